#pragma once

#include <vector>

#include "kn/jet.hpp"

namespace kn {

// Dense univariate polynomial over Jet, c[i] is the coefficient of z^i.
// Trailing coefficients that are exactly zero are trimmed.
class Poly {
 public:
  Poly() = default;
  Poly(const Jet& c);
  explicit Poly(std::vector<Jet> c);

  static Poly monomial(const Jet& c, int deg);
  static Poly linear(const Jet& root);  // z - root

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool value_is_zero() const;
  const Jet& operator[](int i) const { return c_[static_cast<size_t>(i)]; }
  Jet coeff(int i) const;
  const std::vector<Jet>& coeffs() const { return c_; }
  const Jet& lead() const { return c_.back(); }

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Jet& s);
  Poly operator-() const;

  Poly derivative() const;
  Jet eval(const Jet& x) const;
  // p(a + t) as a polynomial in t
  Poly taylor_shift(const Jet& a) const;
  Poly pow(int e) const;

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

 private:
  void trim();
  std::vector<Jet> c_;
};

Poly operator+(Poly a, const Poly& b);
Poly operator-(Poly a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(Poly a, const Jet& s);

// Division with remainder; the divisor's leading coefficient must be a unit.
void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r);
// Exact division test; returns false if b does not divide a.
bool divides(const Poly& b, const Poly& a, Poly* quotient);
// Monic gcd over the jet ring, see rational_function.cpp for the caveat.
Poly gcd(Poly a, Poly b);

}  // namespace kn
