#pragma once

#include <cstdint>
#include <vector>

#include "nerd/filter_bank.hpp"
#include "nerd/image.hpp"

namespace nerd {

// First processing block: convolution, half-wave rectifier, cross-channel
// LRN, max pooling. Defaults mirror AlexNet conv1. lrn_alpha == 0 disables
// normalization entirely.
struct BlockConfig {
  int conv_stride = 4;
  int lrn_depth = 5;
  float lrn_k = 2.0f;
  float lrn_alpha = 1e-4f;
  float lrn_beta = 0.75f;
  int pool_window = 3;
  int pool_stride = 2;
};

// Channel-major response grid: data[(c * height + y) * width + x].
// origin/step locate sample (0,0) and the sample spacing in input-pixel
// coordinates; step == 0 means the grid geometry is unknown.
struct ResponseTensor {
  int width = 0;
  int height = 0;
  int channels = 0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  double step_x = 0.0;
  double step_y = 0.0;
  std::vector<float> data;

  float at(int x, int y, int c) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
};

// Per-pixel feature vectors at full image resolution,
// data[(y * width + x) * dim + c].
struct PixelFeatures {
  int width = 0;
  int height = 0;
  int dim = 0;
  std::vector<float> data;

  const float* vec(int x, int y) const {
    return &data[(static_cast<size_t>(y) * width + x) * dim];
  }
};

struct MacCounts {
  uint64_t actual = 0;  // multiply-accumulates executed (masked synapses skipped)
  uint64_t dense = 0;   // l * c * kh * kw * output positions
};

// Convolution uses edge-replicate padding of kh/2, kw/2 so a constant input
// stays constant through the block. The sparse inner loop visits
// only unmasked synapses; summation order matches the dense order so that a
// dense pass over pre-masked weights is bit-identical.
ResponseTensor forward_block(const Image& img, const FilterBank& bank,
                             const BlockConfig& cfg,
                             MacCounts* macs = nullptr);

// Bilinear resampling of every channel to the target size. Tensors carrying
// grid geometry are aligned on their sample centers; otherwise the grid is
// assumed to span the target uniformly.
PixelFeatures upsample_features(const ResponseTensor& responses, int width,
                                int height);

}  // namespace nerd
