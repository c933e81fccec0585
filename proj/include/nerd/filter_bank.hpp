#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nerd {

enum class FilterKind { kGabor, kRandom };

// First-layer receptive fields with a per-synapse binary connectivity mask.
// Effective weight = weight * mask; masks are derived from (connectivity,
// seed) and never stored on disk.
struct FilterBank {
  int count = 0;        // number of receptive fields l
  int in_channels = 0;  // c, always 3 here
  int kh = 0;
  int kw = 0;
  std::vector<float> weights;   // [l][c][kh][kw] row-major
  std::vector<float> biases;    // [l]
  std::vector<uint8_t> mask;    // same layout as weights, entries 0/1
  double connectivity = 1.0;    // p
  uint64_t seed = 0;

  size_t synapses_per_filter() const {
    return static_cast<size_t>(in_channels) * kh * kw;
  }
  size_t total_synapses() const { return synapses_per_filter() * count; }

  float weight_at(int f, int c, int y, int x) const {
    return weights[((static_cast<size_t>(f) * in_channels + c) * kh + y) * kw + x];
  }
  uint8_t mask_at(int f, int c, int y, int x) const {
    return mask[((static_cast<size_t>(f) * in_channels + c) * kh + y) * kw + x];
  }
};

// Each synapse kept independently with probability p; identical
// (count, p, seed) give an identical mask.
std::vector<uint8_t> generate_connectivity_mask(size_t count, double p,
                                                uint64_t seed);

// Procedural bank: gabor kind yields oriented band-pass kernels over >=4
// orientations and >=2 scales, zero-mean and unit-L2 before masking; random
// kind draws zero-mean weights with variance 2/(c*kh*kw). Biases are zero.
FilterBank generate_filter_bank(int count, int kh, int kw, FilterKind kind,
                                double p, uint64_t seed);

// NERD-FB file format:
//   line 1: "NERDFB1"
//   line 2: "l c kh kw"
//   payload: little-endian float32 weights [l][c][kh][kw], then biases [l]
FilterBank import_filter_bank(const std::string& path, double p, uint64_t seed);
void export_filter_bank(const FilterBank& bank, const std::string& path);

}  // namespace nerd
