#include "nerd/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nerd/rng.hpp"

namespace nerd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

FilterBank make_filter_bank(const PipelineConfig& cfg) {
  uint64_t bank_seed = split_seed(cfg.seed, "filter-bank");
  if (!cfg.bank_path.empty())
    return import_filter_bank(cfg.bank_path, cfg.connectivity, bank_seed);
  return generate_filter_bank(cfg.filter_count, cfg.kernel_size,
                              cfg.kernel_size, cfg.bank_kind,
                              cfg.connectivity, bank_seed);
}

SaliencyMap run_pipeline(const Image& img, const FilterBank& bank,
                         const PipelineConfig& cfg, StageTimes* times) {
  const auto start = Clock::now();
  Image rgb = ensure_rgb(img);

  auto t0 = Clock::now();
  ResponseTensor responses = forward_block(rgb, bank, cfg.block);
  PixelFeatures features = upsample_features(responses, rgb.width, rgb.height);
  const double t_features = seconds_since(t0);

  t0 = Clock::now();
  LabImage lab = rgb_to_lab(rgb);
  const double t_seg = seconds_since(t0);  // SLIC itself timed inside salience

  t0 = Clock::now();
  SaliencyMap map = hierarchical_salience(features, lab, cfg.hierarchy,
                                          split_seed(cfg.seed, "salience"));
  const double t_sal = seconds_since(t0);

  if (times) {
    times->features = t_features;
    times->segmentation = t_seg;
    times->salience = t_sal;
    times->total = seconds_since(start);
  }
  return map;
}

void apply_config_file(PipelineConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);

    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto ke = key.find_last_not_of(" \t");
    key = key.substr(0, ke + 1);
    auto vb = value.find_first_not_of(" \t");
    value = vb == std::string::npos ? "" : value.substr(vb);

    try {
      if (key == "bank") {
        cfg.bank_path = value;
      } else if (key == "bank_kind") {
        if (value == "gabor")
          cfg.bank_kind = FilterKind::kGabor;
        else if (value == "random")
          cfg.bank_kind = FilterKind::kRandom;
        else
          throw std::runtime_error("unknown bank kind: " + value);
      } else if (key == "filters") {
        cfg.filter_count = std::stoi(value);
      } else if (key == "kernel") {
        cfg.kernel_size = std::stoi(value);
      } else if (key == "connectivity") {
        cfg.connectivity = std::stod(value);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else if (key == "stride") {
        cfg.block.conv_stride = std::stoi(value);
      } else if (key == "superpixels") {
        cfg.hierarchy.superpixels = std::stoi(value);
      } else if (key == "compactness") {
        cfg.hierarchy.slic_compactness = std::stod(value);
      } else if (key == "sigma2") {
        cfg.hierarchy.fixed_sigma2 = std::stod(value);
      } else if (key == "atoms") {
        std::istringstream ss(value);
        std::vector<int> counts;
        std::string tok;
        while (std::getline(ss, tok, ','))
          counts.push_back(std::stoi(tok));
        cfg.hierarchy.atom_counts = counts;
      } else {
        throw std::runtime_error("unknown config key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad value for " + key);
    }
  }

  if (cfg.connectivity < 0.0 || cfg.connectivity > 1.0)
    throw std::runtime_error("connectivity must lie in [0,1]");
}

}  // namespace nerd
