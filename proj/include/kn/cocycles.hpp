#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kn/algebras.hpp"

namespace kn {

// Sum of residues over the in-points of a weight-1 form.
Jet cycle_integral(const KNForm& w, const Geometry& geo);

// Projective connection R (weight 2) and affine connection T (weight 1);
// a default-constructed connection is zero in the z-chart.
struct Connections {
  std::optional<KNForm> R;
  std::optional<KNForm> T;
};

// alpha(x, y) = r1 tr(xy) + r2 tr(x) tr(y)
struct BilinearFormGL {
  Jet r1 = Jet(1);
  Jet r2 = Jet(0);
  Jet operator()(const Matrix& x, const Matrix& y) const;
};

Jet trace(const Matrix& x);

// Form-level cocycles.
Jet cocycle_function(const KNForm& a, const KNForm& b, const Geometry& geo);
Jet cocycle_vector(const KNForm& e, const KNForm& f, const Geometry& geo, const Connections& conn = {});
Jet cocycle_mixing(const KNForm& e, const KNForm& a, const Geometry& geo, const Connections& conn = {});

// Cached cocycle values on basis elements and their bilinear extensions.
class Cocycles {
 public:
  Cocycles(GeometryPtr geo, Connections conn = {});

  const Geometry& geo() const { return *geo_; }

  Jet function(KNIndex a, KNIndex b) const;  // gamma(A_a, A_b)
  Jet vector(KNIndex a, KNIndex b) const;    // gamma(e_a, e_b)
  Jet mixing(KNIndex e, KNIndex a) const;    // gamma(e_e, A_a)

  Jet function(const Expansion& a, const Expansion& b) const;
  Jet vector(const Expansion& e, const Expansion& f) const;
  Jet mixing(const Expansion& e, const Expansion& a) const;
  Jet current(const CurrentElement& x, const CurrentElement& y, const BilinearFormGL& alpha) const;

 private:
  GeometryPtr geo_;
  Connections conn_;
  std::vector<PMTerm> R_, T_;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<int, int, int, int, int>, Jet> cache_;
};

// r_f gamma_f (with alpha) + r_m tr(x) gamma_m + r_v gamma_v on the differential
// operator algebra; mixed pairs of the function cocycle are zero.
struct CocycleCombination {
  BilinearFormGL alpha{Jet(1), Jet(0)};
  Jet r_mixing = Jet(0);
  Jet r_vector = Jet(0);
};

Jet diffop_cocycle(const Cocycles& c, const DiffOpElement& a, const DiffOpElement& b, const CocycleCombination& w);

struct AffineElement {
  CurrentElement current;
  Jet central;  // coefficient of t
  friend bool operator==(const AffineElement&, const AffineElement&) = default;
};

AffineElement affine_bracket(const KNAlgebra& alg, const Cocycles& c, const AffineElement& x, const AffineElement& y,
                             const BilinearFormGL& alpha);

struct LocalityReport {
  std::optional<int> upper, lower;  // max and min of n + m with a nonzero value
  bool is_local = true;             // support stays away from the window edges
  int pairs = 0;
  int nonzero = 0;
};

using BasisCocycle = std::function<Jet(KNIndex, KNIndex)>;
LocalityReport check_local(const BasisCocycle& gamma, int N, int lo, int hi);

// Finds phi with gamma1 - gamma2 = phi o bracket on all basis pairs of degrees
// in [lo, hi]; otherwise returns the component of the difference outside the
// span of the bracket columns.
struct CoboundaryResult {
  bool ok = false;
  Expansion phi;
  std::vector<Jet> obstruction;
};

CoboundaryResult coboundary_solve(const BasisCocycle& difference, const std::function<Expansion(KNIndex, KNIndex)>& bracket,
                                  const std::vector<KNIndex>& left, const std::vector<KNIndex>& right);

std::vector<KNIndex> indices_in_window(int N, int lo, int hi);

}  // namespace kn
