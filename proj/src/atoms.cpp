#include "nerd/atoms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nerd/rng.hpp"

namespace nerd {

namespace {

double sq_dist(const std::vector<double>& c, const std::vector<double>& a) {
  double d = 0.0;
  for (size_t i = 0; i < c.size(); ++i) {
    double diff = c[i] - a[i];
    d += diff * diff;
  }
  return d;
}

}  // namespace

AtomSet build_atoms(const PixelFeatures& features,
                    const SuperpixelSegmentation& seg) {
  if (features.width != seg.width || features.height != seg.height)
    throw std::invalid_argument("build_atoms: dimension mismatch");

  AtomSet out;
  out.dim = features.dim;
  out.pixel_count = seg.pixel_count;
  std::vector<std::vector<double>> sums(
      seg.count, std::vector<double>(features.dim, 0.0));

  for (int y = 0; y < seg.height; ++y) {
    for (int x = 0; x < seg.width; ++x) {
      auto& acc = sums[seg.label(x, y)];
      const float* f = features.vec(x, y);
      for (int c = 0; c < features.dim; ++c) acc[c] += f[c];
    }
  }

  out.atoms.resize(seg.count);
  for (int i = 0; i < seg.count; ++i) {
    out.atoms[i].resize(features.dim);
    for (int c = 0; c < features.dim; ++c)
      out.atoms[i][c] =
          static_cast<double>(sums[i][c] / seg.pixel_count[i]);
  }
  return out;
}

SparseAtomSet sparsify_atoms(const AtomSet& atoms, int k, uint64_t seed) {
  const int m = static_cast<int>(atoms.size());
  if (m == 0) throw std::invalid_argument("sparsify_atoms: empty atom set");
  if (k < 1) throw std::invalid_argument("sparsify_atoms: k must be >= 1");
  k = std::min(k, m);
  const int dim = atoms.dim;

  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  SplitMix64 rng(seed);

  // k-means++ seeding.
  {
    int first = static_cast<int>(rng.next() % m);
    centroids.emplace_back(atoms.atoms[first].begin(), atoms.atoms[first].end());
    std::vector<double> d2(m);
    for (int iter = 1; iter < k; ++iter) {
      double total = 0.0;
      for (int i = 0; i < m; ++i) {
        double best = std::numeric_limits<double>::max();
        for (const auto& c : centroids)
          best = std::min(best, sq_dist(c, atoms.atoms[i]));
        d2[i] = best;
        total += best;
      }
      int chosen;
      if (total <= 0.0) {
        chosen = static_cast<int>(rng.next() % m);
      } else {
        double r = rng.next_double() * total;
        chosen = m - 1;
        double acc = 0.0;
        for (int i = 0; i < m; ++i) {
          acc += d2[i];
          if (acc >= r) {
            chosen = i;
            break;
          }
        }
      }
      centroids.emplace_back(atoms.atoms[chosen].begin(),
                             atoms.atoms[chosen].end());
    }
  }

  std::vector<int> assign(m, 0);
  for (int it = 0; it < 100; ++it) {
    for (int i = 0; i < m; ++i) {
      double best = std::numeric_limits<double>::max();
      int bi = 0;
      for (int c = 0; c < k; ++c) {
        double d = sq_dist(centroids[c], atoms.atoms[i]);
        if (d < best) {
          best = d;
          bi = c;
        }
      }
      assign[i] = bi;
    }

    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<int> sizes(k, 0);
    for (int i = 0; i < m; ++i) {
      for (int c = 0; c < dim; ++c) sums[assign[i]][c] += atoms.atoms[i][c];
      ++sizes[assign[i]];
    }

    // Re-seed empty clusters with the atom farthest from its centroid.
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      double worst = -1.0;
      int worst_i = 0;
      for (int i = 0; i < m; ++i) {
        if (sizes[assign[i]] <= 1) continue;
        double d = sq_dist(centroids[assign[i]], atoms.atoms[i]);
        if (d > worst) {
          worst = d;
          worst_i = i;
        }
      }
      int old = assign[worst_i];
      for (int j = 0; j < dim; ++j) {
        sums[old][j] -= atoms.atoms[worst_i][j];
        sums[c][j] += atoms.atoms[worst_i][j];
      }
      --sizes[old];
      sizes[c] = 1;
      assign[worst_i] = c;
    }

    double max_move2 = 0.0;
    for (int c = 0; c < k; ++c) {
      double move2 = 0.0;
      for (int j = 0; j < dim; ++j) {
        double nc = sums[c][j] / sizes[c];
        double d = nc - centroids[c][j];
        move2 += d * d;
        centroids[c][j] = nc;
      }
      max_move2 = std::max(max_move2, move2);
    }
    if (std::sqrt(max_move2) < 1e-6) break;
  }

  // Final assignment against the converged centroids.
  for (int i = 0; i < m; ++i) {
    double best = std::numeric_limits<double>::max();
    int bi = 0;
    for (int c = 0; c < k; ++c) {
      double d = sq_dist(centroids[c], atoms.atoms[i]);
      if (d < best) {
        best = d;
        bi = c;
      }
    }
    assign[i] = bi;
  }

  SparseAtomSet out;
  out.dim = dim;
  out.region_elements.resize(k);
  for (int i = 0; i < m; ++i) out.region_elements[assign[i]].push_back(i);

  // Drop clusters left empty by the final reassignment.
  std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
  std::vector<int> sizes(k, 0);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < dim; ++c) sums[assign[i]][c] += atoms.atoms[i][c];
    ++sizes[assign[i]];
  }
  std::vector<std::vector<int>> regions;
  for (int c = 0; c < k; ++c) {
    if (sizes[c] == 0) continue;
    std::vector<double> centroid(dim);
    for (int j = 0; j < dim; ++j)
      centroid[j] = static_cast<double>(sums[c][j] / sizes[c]);
    out.atoms.push_back(std::move(centroid));
    regions.push_back(std::move(out.region_elements[c]));
  }
  out.region_elements = std::move(regions);

  out.region_pixels.resize(out.atoms.size());
  for (size_t c = 0; c < out.atoms.size(); ++c) {
    long px = 0;
    for (int e : out.region_elements[c]) px += atoms.pixel_count[e];
    out.region_pixels[c] = px;
  }
  return out;
}

}  // namespace nerd
