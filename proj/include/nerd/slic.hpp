#pragma once

#include <vector>

#include "nerd/image.hpp"

namespace nerd {

// Pixel-to-element labeling from SLIC. Every element is 4-connected and
// non-empty; labels are compact in [0, count).
struct SuperpixelSegmentation {
  int width = 0;
  int height = 0;
  int count = 0;
  std::vector<int> labels;       // one per pixel
  std::vector<int> pixel_count;  // z_i per element

  int label(int x, int y) const {
    return labels[static_cast<size_t>(y) * width + x];
  }
};

// Grid-seeded SLIC in (L,a,b,x,y): spacing S = sqrt(wh/target_m), spatial
// term weighted by compactness/S, search window 2S x 2S, ties broken by the
// lowest center index. A post-pass merges orphaned fragments into the
// largest adjacent element. Deterministic.
SuperpixelSegmentation slic(const LabImage& img, int target_m,
                            double compactness = 10.0, int iterations = 10);

}  // namespace nerd
