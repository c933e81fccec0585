#include "nerd/divergence.hpp"

#include <cmath>
#include <stdexcept>

namespace nerd {

namespace {

double l2_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double diff = static_cast<double>(a[i]) - b[i];
    d += diff * diff;
  }
  return std::sqrt(d);
}

}  // namespace

DivergenceParams estimate_sigma(const SparseAtomSet& atoms) {
  const int n = static_cast<int>(atoms.size());
  if (n < 1) throw std::invalid_argument("estimate_sigma: empty atom set");

  double sum = 0.0;
  long pairs = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      sum += l2_dist(atoms.atoms[i], atoms.atoms[j]);
      ++pairs;
    }
  }
  DivergenceParams params;
  params.sigma2 = pairs > 0 && sum > 0.0 ? sum / pairs : 1.0;
  return params;
}

DivergenceMatrix divergence_matrix(const SparseAtomSet& atoms,
                                   const DivergenceParams& params) {
  if (params.sigma2 <= 0.0)
    throw std::invalid_argument("divergence_matrix: sigma must be positive");
  const int n = static_cast<int>(atoms.size());

  DivergenceMatrix out;
  out.size = n;
  out.beta.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d = l2_dist(atoms.atoms[i], atoms.atoms[j]);
      if (!std::isfinite(d))
        throw std::invalid_argument("divergence_matrix: non-finite atom values");
      double beta = 1.0 - std::exp(-d / params.sigma2);
      out.beta[static_cast<size_t>(i) * n + j] = beta;
      out.beta[static_cast<size_t>(j) * n + i] = beta;
    }
  }
  return out;
}

}  // namespace nerd
