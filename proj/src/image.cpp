#include "nerd/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace nerd {

namespace {

std::string lower_ext(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

Image load_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open file: " + path);

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8))
    throw std::runtime_error("corrupt PNG header: " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("libpng init failure");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("libpng init failure");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<unsigned char> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("corrupt PNG data: " + path);
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("unsupported PNG channel layout: " + path);
  }

  size_t stride = png_get_rowbytes(png, info);
  buffer.resize(stride * h);
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = buffer.data() + y * stride;
  png_read_image(png, row_ptrs.data());
  png_destroy_read_struct(&png, &info, nullptr);

  Image img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.channels = channels;
  img.data.resize(img.pixel_count() * channels);
  for (size_t y = 0; y < h; ++y)
    for (size_t i = 0; i < w * static_cast<size_t>(channels); ++i)
      img.data[y * w * channels + i] = buffer[y * stride + i] / 255.0f;
  return img;
}

// Reads one PNM header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
    } else if (!std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
      while ((c = in.get()) != EOF && !std::isspace(c))
        tok.push_back(static_cast<char>(c));
      break;
    }
  }
  return tok;
}

Image load_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  std::string magic = pnm_token(in);
  int channels;
  if (magic == "P5")
    channels = 1;
  else if (magic == "P6")
    channels = 3;
  else
    throw std::runtime_error("corrupt PNM header: " + path);

  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(pnm_token(in));
    h = std::stoi(pnm_token(in));
    maxval = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    throw std::runtime_error("corrupt PNM header: " + path);
  }
  if (w <= 0 || h <= 0 || maxval != 255)
    throw std::runtime_error("corrupt PNM header: " + path);

  Image img;
  img.width = w;
  img.height = h;
  img.channels = channels;
  size_t n = img.pixel_count() * channels;
  std::vector<unsigned char> raw(n);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in.gcount()) != n)
    throw std::runtime_error("corrupt PNM data: " + path);
  img.data.resize(n);
  for (size_t i = 0; i < n; ++i) img.data[i] = raw[i] / 255.0f;
  return img;
}

float srgb_to_linear(float c) {
  return c <= 0.04045f ? c / 12.92f : std::pow((c + 0.055f) / 1.055f, 2.4f);
}

}  // namespace

Image load_image(const std::string& path) {
  std::string ext = lower_ext(path);
  if (ext == "png") return load_png(path);
  if (ext == "ppm" || ext == "pgm" || ext == "pnm") return load_pnm(path);
  throw std::runtime_error("unsupported image format: " + path);
}

Image ensure_rgb(const Image& img) {
  if (img.channels == 3) return img;
  Image out;
  out.width = img.width;
  out.height = img.height;
  out.channels = 3;
  out.data.resize(img.pixel_count() * 3);
  for (size_t i = 0; i < img.pixel_count(); ++i)
    out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = img.data[i];
  return out;
}

LabImage rgb_to_lab(const Image& img) {
  if (img.channels != 3)
    throw std::invalid_argument("rgb_to_lab requires a 3-channel image");

  // D65 reference white.
  constexpr double xn = 0.95047, yn = 1.0, zn = 1.08883;
  constexpr double eps = 216.0 / 24389.0, kappa = 24389.0 / 27.0;
  auto f = [](double t) {
    return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
  };

  LabImage out;
  out.width = img.width;
  out.height = img.height;
  out.data.resize(img.pixel_count() * 3);
  for (size_t i = 0; i < img.pixel_count(); ++i) {
    double r = srgb_to_linear(img.data[3 * i]);
    double g = srgb_to_linear(img.data[3 * i + 1]);
    double b = srgb_to_linear(img.data[3 * i + 2]);
    double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    double fx = f(x / xn), fy = f(y / yn), fz = f(z / zn);
    out.data[3 * i] = static_cast<float>(116.0 * fy - 16.0);
    out.data[3 * i + 1] = static_cast<float>(500.0 * (fx - fy));
    out.data[3 * i + 2] = static_cast<float>(200.0 * (fy - fz));
  }
  return out;
}

void save_gray(const std::vector<float>& values, int width, int height,
               const std::string& path) {
  if (values.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("save_gray: size mismatch");
  std::vector<unsigned char> bytes(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    float v = values[i];
    if (!(v >= 0.0f && v <= 1.0f))
      throw std::invalid_argument("save_gray: value outside [0,1]");
    bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0f));
  }

  std::string ext = lower_ext(path);
  if (ext == "pgm") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failure: " + path);
    return;
  }

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot write file: " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (!png || !info) throw std::runtime_error("libpng init failure");
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("write failure: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
    png_write_row(png, bytes.data() + static_cast<size_t>(y) * width);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save_labels_pgm16(const std::vector<int>& labels, int width, int height,
                       const std::string& path) {
  if (labels.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("save_labels_pgm16: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "P5\n" << width << " " << height << "\n65535\n";
  for (int v : labels) {
    unsigned char hi = static_cast<unsigned char>((v >> 8) & 0xff);
    unsigned char lo = static_cast<unsigned char>(v & 0xff);
    out.put(static_cast<char>(hi));
    out.put(static_cast<char>(lo));
  }
  if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace nerd
