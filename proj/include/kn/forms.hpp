#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "kn/rational_function.hpp"

namespace kn {

struct MarkedConfig {
  std::vector<Jet> points;  // in-points P_1..P_N, out-point is infinity

  int N() const { return static_cast<int>(points.size()); }
  void validate() const;
  static MarkedConfig from_rationals(const std::vector<Q>& pts);
};

struct KNIndex {
  int n = 0;
  int p = 1;
  friend auto operator<=>(const KNIndex&, const KNIndex&) = default;
};

// c * prod_j (z - z_j)^e_j
struct PMTerm {
  Jet c;
  std::vector<int> e;
};

class KNForm {
 public:
  KNForm() = default;
  KNForm(int weight, RationalFunction coeff) : weight_(weight), coeff_(std::move(coeff)), pm_(std::nullopt) {}
  KNForm(int weight, RationalFunction coeff, std::vector<PMTerm> pm)
      : weight_(weight), coeff_(std::move(coeff)), pm_(std::move(pm)) {}

  int weight() const { return weight_; }
  const RationalFunction& coeff() const { return coeff_; }
  // Point-monomial decomposition when known (basis elements and their products).
  const std::optional<std::vector<PMTerm>>& pm() const { return pm_; }
  bool is_zero() const { return coeff_.is_zero(); }

  KNForm& operator+=(const KNForm& o);
  KNForm& operator-=(const KNForm& o);
  KNForm& operator*=(const Jet& s);
  KNForm operator-() const;

  friend bool operator==(const KNForm& a, const KNForm& b) { return a.weight_ == b.weight_ && a.coeff_ == b.coeff_; }

 private:
  int weight_ = 0;
  RationalFunction coeff_;
  std::optional<std::vector<PMTerm>> pm_ = std::vector<PMTerm>{};
};

KNForm operator+(KNForm a, const KNForm& b);
KNForm operator-(KNForm a, const KNForm& b);
KNForm operator*(KNForm a, const Jet& s);
// Tensor product of forms, weights add.
KNForm tensor(const KNForm& a, const KNForm& b);
// d/dz of the coefficient; kept at the same weight label (used inside cocycle integrands).
KNForm coeff_derivative(const KNForm& a);
// Point-monomial arithmetic.
std::vector<PMTerm> pm_derivative(const std::vector<PMTerm>& ts);
std::vector<PMTerm> pm_product(const std::vector<PMTerm>& a, const std::vector<PMTerm>& b);

using Expansion = std::map<KNIndex, Jet>;

// Cached residue calculus for one configuration.
class Geometry {
 public:
  explicit Geometry(MarkedConfig cfg);

  const MarkedConfig& cfg() const { return cfg_; }
  int N() const { return cfg_.N(); }

  // Residue at P_i of prod_j (z - z_j)^E_j.
  Jet residue(const std::vector<int>& E, int i) const;
  // Sum of residues over all in-points (memoized).
  Jet cycle(const std::vector<int>& E) const;
  // Normalization constant of f^lambda_{n,p}.
  Jet basis_constant(int lambda, int n, int p) const;
  std::vector<int> basis_exponents(int lambda, int n, int p) const;

  // Degree window [lo, hi] of the expansion of a weight-lambda sum of point monomials.
  std::pair<int, int> window(int lambda, const std::vector<PMTerm>& terms) const;
  // Expansion of a weight-lambda point-monomial sum over f^lambda_{l,s}.
  Expansion expand(int lambda, const std::vector<PMTerm>& terms) const;

 private:
  MarkedConfig cfg_;
  std::vector<std::vector<Jet>> inv_diff_;  // 1/(z_i - z_j)
  mutable std::mutex mu_;
  mutable std::map<std::vector<int>, Jet> cycle_cache_;
  mutable std::map<std::tuple<int, int, int>, Jet> const_cache_;
};

using GeometryPtr = std::shared_ptr<const Geometry>;
GeometryPtr make_geometry(const MarkedConfig& cfg);

KNForm basis_form(const MarkedConfig& cfg, int lambda, KNIndex idx);
KNForm basis_form(const Geometry& g, int lambda, KNIndex idx);

// Weight-corrected order at an in-point or at infinity.
int form_order_at_point(const KNForm& f, const MarkedConfig& cfg, int i);
int form_order_at_infinity(const KNForm& f);

Jet kn_pairing(const KNForm& f, const KNForm& g, const MarkedConfig& cfg);
Jet kn_pairing(const KNForm& f, const KNForm& g, const Geometry& geo);
// Minus the residue at infinity of a weight-1 form.
Jet residue_at_infinity_sum(const KNForm& w);

KNForm lie_derivative(const KNForm& e, const KNForm& f);

struct DegreeWindow {
  int lo = 0, hi = -1;
};

// Coefficients over the KN basis via the dual pairing. With an explicit window the
// residual is checked and WindowTooSmall is thrown when it does not vanish.
Expansion expand_in_basis(const KNForm& f, const Geometry& geo, std::optional<DegreeWindow> window = std::nullopt,
                          bool verify = false);
KNForm from_expansion(const Expansion& ex, int lambda, const Geometry& geo);

}  // namespace kn
