#pragma once

#include <vector>

#include "nerd/atoms.hpp"

namespace nerd {

struct DivergenceParams {
  double sigma2 = 1.0;  // control parameter σ², must be positive
};

// Symmetric pairwise divergence, zero diagonal, entries in [0,1).
struct DivergenceMatrix {
  int size = 0;
  std::vector<double> beta;  // row-major size x size

  double at(int i, int j) const {
    return beta[static_cast<size_t>(i) * size + j];
  }
};

// Auto σ: σ² = mean pairwise L2 distance between sparse atoms, falling back
// to 1 when every pair coincides.
DivergenceParams estimate_sigma(const SparseAtomSet& atoms);

// β_ij = 1 - exp(-‖t̂_i - t̂_j‖₂ / σ²).
DivergenceMatrix divergence_matrix(const SparseAtomSet& atoms,
                                   const DivergenceParams& params);

}  // namespace nerd
