#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nerd/divergence.hpp"
#include "nerd/rng.hpp"

using nerd::DivergenceMatrix;
using nerd::DivergenceParams;
using nerd::SparseAtomSet;

namespace {

SparseAtomSet atoms_1d(const std::vector<float>& values) {
  SparseAtomSet s;
  s.dim = 1;
  for (float v : values) {
    s.atoms.push_back({v});
    s.region_elements.push_back({static_cast<int>(s.region_elements.size())});
    s.region_pixels.push_back(1);
  }
  return s;
}

SparseAtomSet random_atoms(int n, int dim, nerd::SplitMix64& rng,
                           double scale = 1.0) {
  SparseAtomSet s;
  s.dim = dim;
  for (int i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v)
      x = static_cast<float>((rng.next_double() * 2.0 - 1.0) * scale);
    s.atoms.push_back(std::move(v));
    s.region_elements.push_back({i});
    s.region_pixels.push_back(1);
  }
  return s;
}

}  // namespace

TEST_CASE("auto sigma examples") {
  CHECK(nerd::estimate_sigma(atoms_1d({0.0f, 4.0f})).sigma2 ==
        doctest::Approx(4.0));
  CHECK(nerd::estimate_sigma(atoms_1d({3.0f, 3.0f, 3.0f})).sigma2 == 1.0);
  CHECK(nerd::estimate_sigma(atoms_1d({5.0f})).sigma2 == 1.0);
  // distances {1,3,2} -> mean 2
  CHECK(nerd::estimate_sigma(atoms_1d({0.0f, 1.0f, 3.0f})).sigma2 ==
        doctest::Approx(2.0));
}

TEST_CASE("kernel evaluation") {
  SparseAtomSet s = atoms_1d({0.0f, 4.0f});
  DivergenceParams p{4.0};  // distance equals sigma^2
  DivergenceMatrix d = nerd::divergence_matrix(s, p);
  CHECK(d.at(0, 0) == 0.0);
  CHECK(d.at(1, 1) == 0.0);
  CHECK(d.at(0, 1) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("sigma must be positive") {
  SparseAtomSet s = atoms_1d({0.0f, 1.0f});
  CHECK_THROWS_AS(nerd::divergence_matrix(s, DivergenceParams{0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(nerd::divergence_matrix(s, DivergenceParams{-1.0}),
                  std::invalid_argument);
}

TEST_CASE("matrix properties over random atom sets") {
  nerd::SplitMix64 rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + static_cast<int>(rng.next() % 8);
    int dim = 1 + static_cast<int>(rng.next() % 6);
    SparseAtomSet s = random_atoms(n, dim, rng);
    DivergenceParams p = nerd::estimate_sigma(s);
    DivergenceMatrix d = nerd::divergence_matrix(s, p);

    for (int i = 0; i < n; ++i) {
      CHECK(d.at(i, i) == 0.0);
      for (int j = 0; j < n; ++j) {
        CHECK(d.at(i, j) == d.at(j, i));
        CHECK(d.at(i, j) >= 0.0);
        CHECK(d.at(i, j) < 1.0);
      }
    }
  }
}

TEST_CASE("divergence increases strictly with distance") {
  SparseAtomSet s = atoms_1d({0.0f, 1.0f, 2.5f, 7.0f});
  DivergenceMatrix d = nerd::divergence_matrix(s, DivergenceParams{2.0});
  CHECK(d.at(0, 1) < d.at(0, 2));
  CHECK(d.at(0, 2) < d.at(0, 3));
  CHECK(d.at(1, 2) < d.at(1, 3));
}

TEST_CASE("auto-sigma makes divergence scale invariant") {
  nerd::SplitMix64 rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + static_cast<int>(rng.next() % 6);
    SparseAtomSet s = random_atoms(n, 4, rng);
    SparseAtomSet scaled = s;
    const float c = 37.5f;
    for (auto& a : scaled.atoms)
      for (auto& v : a) v *= c;

    DivergenceMatrix d1 = nerd::divergence_matrix(s, nerd::estimate_sigma(s));
    DivergenceMatrix d2 =
        nerd::divergence_matrix(scaled, nerd::estimate_sigma(scaled));
    for (size_t i = 0; i < d1.beta.size(); ++i)
      CHECK(d1.beta[i] == doctest::Approx(d2.beta[i]).epsilon(1e-6));
  }
}
