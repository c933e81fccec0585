#pragma once

#include <cstdint>
#include <vector>

#include "nerd/forward.hpp"
#include "nerd/slic.hpp"

namespace nerd {

// One mean feature vector per segmentation element.
struct AtomSet {
  int dim = 0;
  std::vector<std::vector<double>> atoms;  // t_i, one per element
  std::vector<int> pixel_count;           // z_i

  size_t size() const { return atoms.size(); }
};

// k-means centroids over the atoms; region_elements[i] lists the elements
// encoded by sparse atom i, region_pixels[i] their summed pixel count. The
// region sets partition the elements and none is empty.
struct SparseAtomSet {
  int dim = 0;
  std::vector<std::vector<double>> atoms;  // t̂_i
  std::vector<std::vector<int>> region_elements;
  std::vector<long> region_pixels;  // |s_i|

  size_t size() const { return atoms.size(); }
};

// t_i = (1/z_i) * sum of f_k over element pixels, per channel.
AtomSet build_atoms(const PixelFeatures& features,
                    const SuperpixelSegmentation& seg);

// Seeded k-means++ initialization, Euclidean distance, at most 100 Lloyd
// iterations or max centroid movement < 1e-6. k clamps to the atom count.
// Empty clusters are re-seeded with the atom farthest from its centroid.
SparseAtomSet sparsify_atoms(const AtomSet& atoms, int k, uint64_t seed);

}  // namespace nerd
