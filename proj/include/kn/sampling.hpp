#pragma once

#include <random>
#include <set>
#include <vector>

#include "kn/algebras.hpp"

namespace kn {

// Seeded samplers shared by the property checks.
using Rng = std::mt19937_64;

inline Q small_rational(Rng& rng) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
  Q r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

inline std::vector<Q> random_points(Rng& rng, int n) {
  std::set<Q> seen;
  std::vector<Q> v;
  while (static_cast<int>(v.size()) < n) {
    Q r = small_rational(rng);
    if (seen.insert(r).second) v.push_back(r);
  }
  return v;
}

inline GeometryPtr random_geo(Rng& rng, int n) { return make_geometry(MarkedConfig::from_rationals(random_points(rng, n))); }

inline Matrix random_matrix(Rng& rng, int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Jet(small_rational(rng));
  return m;
}

inline Expansion random_expansion(Rng& rng, int N, int terms, int lo = -2, int hi = 2) {
  std::uniform_int_distribution<int> deg(lo, hi), pt(1, N);
  Expansion e;
  for (int t = 0; t < terms; ++t) axpy(e, Jet(small_rational(rng)), Expansion{{KNIndex{deg(rng), pt(rng)}, Jet(1)}});
  return e;
}

inline CurrentElement random_current(Rng& rng, int N, int rank, int terms = 2) {
  CurrentElement c(rank);
  for (int t = 0; t < terms; ++t) c.add(random_matrix(rng, rank), random_expansion(rng, N, 1));
  return c;
}

inline DiffOpElement random_diffop(Rng& rng, int N, int rank) {
  DiffOpElement d;
  d.current = random_current(rng, N, rank);
  d.vector = random_expansion(rng, N, 2);
  return d;
}

// Random combination of two members of a basis list.
inline Expansion random_combination(Rng& rng, const std::vector<Expansion>& basis, int terms = 2) {
  Expansion e;
  if (basis.empty()) return e;
  for (int k = 0; k < terms; ++k) axpy(e, Jet(small_rational(rng)), basis[rng() % basis.size()]);
  return e;
}

}  // namespace kn
