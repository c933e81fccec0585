#pragma once

#include <cstdint>
#include <string>

#include "nerd/filter_bank.hpp"
#include "nerd/forward.hpp"
#include "nerd/salience.hpp"

namespace nerd {

// Everything a full detection run needs. One root seed is split
// deterministically per stage.
struct PipelineConfig {
  std::string bank_path;  // NERD-FB file; empty selects the generator
  FilterKind bank_kind = FilterKind::kGabor;
  int filter_count = 96;
  int kernel_size = 11;
  double connectivity = 0.25;
  uint64_t seed = 1;
  BlockConfig block;
  HierarchyConfig hierarchy;
};

struct StageTimes {
  double features = 0.0;  // forward block + upsample
  double segmentation = 0.0;
  double salience = 0.0;  // atoms, clustering, divergence, aggregation
  double total = 0.0;
};

FilterBank make_filter_bank(const PipelineConfig& cfg);

// Full NeRD run: neural features, SLIC, hierarchical salience.
SaliencyMap run_pipeline(const Image& img, const FilterBank& bank,
                         const PipelineConfig& cfg,
                         StageTimes* times = nullptr);

// key=value config file; '#' starts a comment. Unknown keys are rejected.
void apply_config_file(PipelineConfig& cfg, const std::string& path);

}  // namespace nerd
