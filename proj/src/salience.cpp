#include "nerd/salience.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "nerd/rng.hpp"

namespace nerd {

SalienceScores layer_salience(const SparseAtomSet& atoms,
                              const DivergenceMatrix& div) {
  const int n = static_cast<int>(atoms.size());
  if (div.size != n)
    throw std::invalid_argument("layer_salience: matrix dimension mismatch");

  SalienceScores scores;
  scores.alpha.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double a = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      a += static_cast<double>(atoms.region_pixels[j]) * div.at(i, j);
    }
    scores.alpha[i] = a;
  }
  return scores;
}

std::vector<double> propagate_to_pixels(const SalienceScores& scores,
                                        const SparseAtomSet& atoms,
                                        const SuperpixelSegmentation& seg) {
  // element -> owning sparse atom
  std::vector<int> owner(seg.count, -1);
  for (size_t a = 0; a < atoms.size(); ++a)
    for (int e : atoms.region_elements[a]) owner[e] = static_cast<int>(a);
  for (int e = 0; e < seg.count; ++e)
    if (owner[e] < 0)
      throw std::invalid_argument("propagate_to_pixels: uncovered element " +
                                  std::to_string(e));

  std::vector<double> map(seg.labels.size());
  for (size_t p = 0; p < seg.labels.size(); ++p)
    map[p] = scores.alpha[owner[seg.labels[p]]];
  return map;
}

SaliencyMap hierarchical_salience(const PixelFeatures& features,
                                  const LabImage& img,
                                  const HierarchyConfig& cfg, uint64_t seed) {
  if (cfg.atom_counts.empty())
    throw std::invalid_argument("hierarchical_salience: no hierarchy layers");
  if (!std::is_sorted(cfg.atom_counts.begin(), cfg.atom_counts.end(),
                      std::less_equal<int>()))
    throw std::invalid_argument(
        "hierarchical_salience: atom counts must be strictly increasing");
  if (features.width != img.width || features.height != img.height)
    throw std::invalid_argument(
        "hierarchical_salience: features must be at image resolution");

  SuperpixelSegmentation seg =
      slic(img, cfg.superpixels, cfg.slic_compactness, cfg.slic_iterations);
  AtomSet atoms = build_atoms(features, seg);

  std::vector<double> sum(features.data.size() / features.dim, 0.0);
  for (size_t layer = 0; layer < cfg.atom_counts.size(); ++layer) {
    uint64_t layer_seed =
        split_seed(seed, "layer-" + std::to_string(cfg.atom_counts[layer]));
    SparseAtomSet sparse =
        sparsify_atoms(atoms, cfg.atom_counts[layer], layer_seed);
    DivergenceParams params;
    if (cfg.fixed_sigma2 > 0.0)
      params.sigma2 = cfg.fixed_sigma2;
    else
      params = estimate_sigma(sparse);
    DivergenceMatrix div = divergence_matrix(sparse, params);
    SalienceScores scores = layer_salience(sparse, div);
    std::vector<double> layer_map = propagate_to_pixels(scores, sparse, seg);
    for (size_t p = 0; p < sum.size(); ++p) sum[p] += layer_map[p];
  }

  SaliencyMap out;
  out.width = features.width;
  out.height = features.height;
  out.values.resize(sum.size());

  const auto [lo_it, hi_it] = std::minmax_element(sum.begin(), sum.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi <= 0.0 || hi == lo) {
    std::fill(out.values.begin(), out.values.end(), 0.0f);  // degenerate input
    return out;
  }
  for (size_t p = 0; p < sum.size(); ++p)
    out.values[p] = static_cast<float>((sum[p] - lo) / (hi - lo));
  return out;
}

}  // namespace nerd
