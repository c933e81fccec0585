#include "nerd/rng.hpp"

namespace nerd {

uint64_t split_seed(uint64_t root, std::string_view stage) {
  // FNV-1a over the tag, folded into the root via splitmix.
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : stage) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  SplitMix64 mix(root ^ h);
  return mix.next();
}

}  // namespace nerd
