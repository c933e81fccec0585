#include "nerd/filter_bank.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nerd/rng.hpp"

namespace nerd {

namespace {

void validate_shape(int count, int channels, int kh, int kw) {
  if (count < 1 || channels < 1 || kh < 1 || kw < 1)
    throw std::invalid_argument("filter bank dimensions must be positive");
}

// One 2D gabor kernel, replicated across input channels by the caller.
void fill_gabor(float* dst, int kh, int kw, double theta, double wavelength,
                double phase) {
  const double sigma = 0.4 * wavelength;
  const double gamma = 0.8;  // spatial aspect ratio
  const double cy = (kh - 1) / 2.0, cx = (kw - 1) / 2.0;
  for (int y = 0; y < kh; ++y) {
    for (int x = 0; x < kw; ++x) {
      double dx = x - cx, dy = y - cy;
      double xr = dx * std::cos(theta) + dy * std::sin(theta);
      double yr = -dx * std::sin(theta) + dy * std::cos(theta);
      double env = std::exp(-(xr * xr + gamma * gamma * yr * yr) /
                            (2.0 * sigma * sigma));
      double carrier =
          std::cos(2.0 * std::numbers::pi * xr / wavelength + phase);
      dst[y * kw + x] = static_cast<float>(env * carrier);
    }
  }
}

void zero_mean_unit_norm(float* w, size_t n) {
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) mean += w[i];
  mean /= static_cast<double>(n);
  double norm2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    w[i] = static_cast<float>(w[i] - mean);
    norm2 += static_cast<double>(w[i]) * w[i];
  }
  double norm = std::sqrt(norm2);
  if (norm > 0.0)
    for (size_t i = 0; i < n; ++i) w[i] = static_cast<float>(w[i] / norm);
}

float read_le_float(const unsigned char* p) {
  uint32_t bits = static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
                  (static_cast<uint32_t>(p[2]) << 16) |
                  (static_cast<uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

void write_le_float(unsigned char* p, float v) {
  uint32_t bits = std::bit_cast<uint32_t>(v);
  p[0] = static_cast<unsigned char>(bits & 0xff);
  p[1] = static_cast<unsigned char>((bits >> 8) & 0xff);
  p[2] = static_cast<unsigned char>((bits >> 16) & 0xff);
  p[3] = static_cast<unsigned char>((bits >> 24) & 0xff);
}

}  // namespace

std::vector<uint8_t> generate_connectivity_mask(size_t count, double p,
                                                uint64_t seed) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("connectivity must lie in [0,1]");
  std::vector<uint8_t> mask(count);
  SplitMix64 rng(seed);
  for (size_t i = 0; i < count; ++i)
    mask[i] = rng.next_double() < p ? 1 : 0;
  return mask;
}

FilterBank generate_filter_bank(int count, int kh, int kw, FilterKind kind,
                                double p, uint64_t seed) {
  constexpr int channels = 3;
  validate_shape(count, channels, kh, kw);

  FilterBank bank;
  bank.count = count;
  bank.in_channels = channels;
  bank.kh = kh;
  bank.kw = kw;
  bank.connectivity = p;
  bank.seed = seed;
  bank.weights.resize(bank.total_synapses());
  bank.biases.assign(count, 0.0f);

  if (kind == FilterKind::kGabor) {
    if (kh % 2 == 0 || kw % 2 == 0)
      throw std::invalid_argument("gabor kernels require odd sizes");
    // Sweep orientations fastest so even small banks cover >=4 orientations;
    // wavelength and phase advance as the index wraps.
    const int orientations = 8;
    const double min_side = std::min(kh, kw);
    std::vector<float> plane(static_cast<size_t>(kh) * kw);
    for (int f = 0; f < count; ++f) {
      int oi = f % orientations;
      int rest = f / orientations;
      double theta = std::numbers::pi * oi / orientations;
      double wavelength = min_side / (2.0 + (rest % 3));  // >=2 scales
      double phase = (rest / 3) % 2 == 0 ? 0.0 : std::numbers::pi / 2.0;
      fill_gabor(plane.data(), kh, kw, theta, wavelength, phase);
      float* dst = &bank.weights[static_cast<size_t>(f) * bank.synapses_per_filter()];
      for (int c = 0; c < channels; ++c)
        std::memcpy(dst + static_cast<size_t>(c) * kh * kw, plane.data(),
                    plane.size() * sizeof(float));
      zero_mean_unit_norm(dst, bank.synapses_per_filter());
    }
  } else {
    SplitMix64 rng(split_seed(seed, "filter-weights"));
    const double stddev =
        std::sqrt(2.0 / static_cast<double>(bank.synapses_per_filter()));
    for (auto& w : bank.weights)
      w = static_cast<float>(rng.next_normal() * stddev);
  }

  bank.mask = generate_connectivity_mask(bank.total_synapses(), p,
                                         split_seed(seed, "connectivity"));
  return bank;
}

FilterBank import_filter_bank(const std::string& path, double p,
                              uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open filter bank: " + path);

  std::string magic;
  std::getline(in, magic);
  if (magic != "NERDFB1")
    throw std::runtime_error("filter bank magic mismatch: " + path);

  std::string dims_line;
  std::getline(in, dims_line);
  std::istringstream dims(dims_line);
  int l = 0, c = 0, kh = 0, kw = 0;
  if (!(dims >> l >> c >> kh >> kw))
    throw std::runtime_error("filter bank dimension line malformed: " + path);
  validate_shape(l, c, kh, kw);

  FilterBank bank;
  bank.count = l;
  bank.in_channels = c;
  bank.kh = kh;
  bank.kw = kw;
  bank.connectivity = p;
  bank.seed = seed;

  size_t n_floats = bank.total_synapses() + static_cast<size_t>(l);
  std::vector<unsigned char> payload(n_floats * 4);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size()));
  if (static_cast<size_t>(in.gcount()) != payload.size())
    throw std::runtime_error("filter bank payload size mismatch: " + path);

  bank.weights.resize(bank.total_synapses());
  bank.biases.resize(l);
  for (size_t i = 0; i < bank.weights.size(); ++i)
    bank.weights[i] = read_le_float(&payload[4 * i]);
  for (size_t i = 0; i < bank.biases.size(); ++i)
    bank.biases[i] = read_le_float(&payload[4 * (bank.weights.size() + i)]);
  for (float w : bank.weights)
    if (!std::isfinite(w))
      throw std::runtime_error("filter bank contains non-finite weights: " + path);
  for (float b : bank.biases)
    if (!std::isfinite(b))
      throw std::runtime_error("filter bank contains non-finite biases: " + path);

  bank.mask = generate_connectivity_mask(bank.total_synapses(), p,
                                         split_seed(seed, "connectivity"));
  return bank;
}

void export_filter_bank(const FilterBank& bank, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write filter bank: " + path);
  out << "NERDFB1\n"
      << bank.count << " " << bank.in_channels << " " << bank.kh << " "
      << bank.kw << "\n";
  std::vector<unsigned char> payload((bank.weights.size() + bank.biases.size()) * 4);
  for (size_t i = 0; i < bank.weights.size(); ++i)
    write_le_float(&payload[4 * i], bank.weights[i]);
  for (size_t i = 0; i < bank.biases.size(); ++i)
    write_le_float(&payload[4 * (bank.weights.size() + i)], bank.biases[i]);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace nerd
