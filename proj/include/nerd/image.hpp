#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nerd {

// Row-major interleaved image, values in [0,1]. channels is 1 or 3.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;

  float at(int x, int y, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  float& at(int x, int y, int c) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

// CIELAB under D65: L in [0,100], a/b roughly [-128,127].
struct LabImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // 3 per pixel: L, a, b

  const float* lab(int x, int y) const {
    return &data[(static_cast<size_t>(y) * width + x) * 3];
  }
};

// Decodes an 8-bit PNG, PPM (P6) or PGM (P5) file; byte v maps to v/255.
Image load_image(const std::string& path);

// Replicates a single channel to 3; passes 3-channel images through.
Image ensure_rgb(const Image& img);

// Standard sRGB -> CIELAB (D65), per pixel. Rejects non-3-channel input.
LabImage rgb_to_lab(const Image& img);

// Writes an 8-bit grayscale PNG or PGM depending on file extension;
// value v encodes as round(v * 255). Values must lie in [0,1].
void save_gray(const std::vector<float>& values, int width, int height,
               const std::string& path);

// 16-bit PGM label-map export used for segmentation debugging.
void save_labels_pgm16(const std::vector<int>& labels, int width, int height,
                       const std::string& path);

}  // namespace nerd
