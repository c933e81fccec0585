#pragma once

#include <cstdint>
#include <vector>

#include "nerd/atoms.hpp"
#include "nerd/divergence.hpp"
#include "nerd/forward.hpp"
#include "nerd/slic.hpp"

namespace nerd {

// Atom-count schedule across hierarchy layers, plus the parameters shared
// by every layer.
struct HierarchyConfig {
  std::vector<int> atom_counts = {5, 25, 45, 65, 85};  // strictly increasing
  int superpixels = 300;
  double slic_compactness = 10.0;
  int slic_iterations = 10;
  double fixed_sigma2 = 0.0;  // 0 means auto-σ per layer
};

struct SalienceScores {
  std::vector<double> alpha;  // per sparse atom
};

// Per-pixel salience in [0,1], same dimensions as the input image.
struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;
};

// α_i = Σ_{j≠i} |s_j| · β_ij with |s_j| in pixels.
SalienceScores layer_salience(const SparseAtomSet& atoms,
                              const DivergenceMatrix& div);

// Every pixel receives the α of the sparse atom owning its element.
std::vector<double> propagate_to_pixels(const SalienceScores& scores,
                                        const SparseAtomSet& atoms,
                                        const SuperpixelSegmentation& seg);

// Runs every hierarchy layer over one shared segmentation, sums the
// propagated pixel maps and min-max normalizes the sum to [0,1]. A
// feature-uniform image yields the all-zero map.
SaliencyMap hierarchical_salience(const PixelFeatures& features,
                                  const LabImage& img,
                                  const HierarchyConfig& cfg, uint64_t seed);

}  // namespace nerd
