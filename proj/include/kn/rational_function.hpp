#pragma once

#include <climits>
#include <optional>
#include <vector>

#include "kn/poly.hpp"

namespace kn {

class RationalFunction {
 public:
  RationalFunction() : den_(Jet(1)) {}
  RationalFunction(const Jet& c) : num_(c), den_(Jet(1)) {}
  RationalFunction(Poly num) : num_(std::move(num)), den_(Jet(1)) {}
  // Normalizes; throws ZeroDenominator.
  RationalFunction(Poly num, Poly den);

  static RationalFunction raw(Poly num, Poly den);  // no normalization

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  RationalFunction& operator+=(const RationalFunction& o);
  RationalFunction& operator-=(const RationalFunction& o);
  RationalFunction& operator*=(const RationalFunction& o);
  RationalFunction& operator*=(const Jet& s);
  RationalFunction operator-() const;
  RationalFunction inverse() const;

  RationalFunction derivative() const;
  Jet eval(const Jet& x) const;

  friend bool operator==(const RationalFunction& a, const RationalFunction& b);
  friend bool operator!=(const RationalFunction& a, const RationalFunction& b) { return !(a == b); }

 private:
  Poly num_, den_;
};

RationalFunction operator+(RationalFunction a, const RationalFunction& b);
RationalFunction operator-(RationalFunction a, const RationalFunction& b);
RationalFunction operator*(RationalFunction a, const RationalFunction& b);
RationalFunction operator*(RationalFunction a, const Jet& s);
RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);

RationalFunction rf_normalize(const RationalFunction& f);

// A point of the sphere: finite jet or infinity.
struct Center {
  bool infinite = false;
  Jet point;
  static Center at(const Jet& p) { return Center{false, p}; }
  static Center infinity() { return Center{true, Jet()}; }
};

// Truncated Laurent series sum c[i] t^(lo+i); exponents >= prec are unknown.
struct Laurent {
  static constexpr int kExact = INT_MAX / 4;
  int lo = 0;
  std::vector<Jet> c;
  int prec = kExact;

  Jet at(int e) const;
  int valuation() const;  // first exponent with a nonzero coefficient, kExact if none known
  void trim_front();
};

Laurent laurent_mul(const Laurent& a, const Laurent& b, int prec);
Laurent laurent_inverse(const Laurent& a, int prec);
Laurent laurent_from_poly(const Poly& p, int shift = 0);

struct LaurentExpansion {
  Center center;
  int leading_order = 0;
  std::vector<Jet> coefficients;  // empty for the zero function
};

// Local series of f at the center (in z - c, or in w = 1/z at infinity), exact below prec.
Laurent local_series(const RationalFunction& f, const Center& c, int prec);

LaurentExpansion laurent_expand(const RationalFunction& f, const Center& c, int depth);
int order_at(const RationalFunction& f, const Center& c);
Jet residue_at(const RationalFunction& f, const Jet& c);

}  // namespace kn
