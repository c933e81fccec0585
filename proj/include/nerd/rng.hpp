#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace nerd {

// splitmix64: deterministic across platforms, unlike distribution wrappers.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53 bits of precision.
  double next_double() { return (next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double next_normal() {
    double u1 = next_double(), u2 = next_double();
    while (u1 == 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  uint64_t state_;
};

// Derives an independent stage seed from a root seed and a stage tag, so one
// root seed reproduces a whole run.
uint64_t split_seed(uint64_t root, std::string_view stage);

}  // namespace nerd
