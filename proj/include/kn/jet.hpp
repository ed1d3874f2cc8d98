#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace kn {

using Q = mpq_class;

std::string to_string(const Q& q);
Q parse_rational(const std::string& s);

// Rational extended by two nilpotent directions, eps1^2 = eps2^2 = 0.
// The mask tracks which infinitesimal parts may be nonzero so that
// pure rationals pay for one mpq operation only.
class Jet {
 public:
  enum : std::uint8_t { kD1 = 1, kD2 = 2, kD12 = 4 };

  Jet() = default;
  Jet(long v) : v_(v) {}
  Jet(const Q& v) : v_(v) {}
  Jet(Q v, Q d1, Q d2, Q d12);

  static Jet eps1() { return Jet(0, 1, 0, 0); }
  static Jet eps2() { return Jet(0, 0, 1, 0); }

  const Q& v() const { return v_; }
  Q d1() const { return (mask_ & kD1) ? d1_ : Q(0); }
  Q d2() const { return (mask_ & kD2) ? d2_ : Q(0); }
  Q d12() const { return (mask_ & kD12) ? d12_ : Q(0); }

  bool pure() const { return mask_ == 0; }
  bool is_zero() const;
  bool is_unit() const { return sgn(v_) != 0; }
  bool is_nilpotent() const { return sgn(v_) == 0; }

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet operator-() const;

  Jet inverse() const;
  Jet pow(long e) const;

  // Parts as jets: value, d/deps1, d/deps2, mixed.
  Jet part1() const { return Jet(d1(), 0, d12(), 0); }
  Jet part2() const { return Jet(d2(), d12(), 0, 0); }
  Jet value_jet() const { return Jet(v_); }

  // (eps1, eps2) -> (eps2, eps1)
  Jet swapped() const { return Jet(v_, d2(), d1(), d12()); }

  friend bool operator==(const Jet& a, const Jet& b);
  friend bool operator!=(const Jet& a, const Jet& b) { return !(a == b); }

 private:
  void tidy();

  Q v_;
  Q d1_, d2_, d12_;
  std::uint8_t mask_ = 0;
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }

std::ostream& operator<<(std::ostream& os, const Jet& j);

// Generalized binomial coefficient binom(e, m) for integer e, m >= 0.
Q binomial(long e, long m);

}  // namespace kn
