#include "kn/jet.hpp"

#include <ostream>
#include <stdexcept>

#include "kn/errors.hpp"

namespace kn {

std::string to_string(const Q& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Q parse_rational(const std::string& s) {
  Q q;
  if (s.empty() || q.set_str(s, 10) != 0) throw KnError(ErrorKind::Usage, "bad rational '" + s + "'");
  if (sgn(q.get_den()) == 0) throw KnError(ErrorKind::ZeroDenominator, "rational with zero denominator");
  q.canonicalize();
  return q;
}

Jet::Jet(Q v, Q d1, Q d2, Q d12) : v_(std::move(v)), d1_(std::move(d1)), d2_(std::move(d2)), d12_(std::move(d12)) {
  mask_ = kD1 | kD2 | kD12;
  tidy();
}

void Jet::tidy() {
  if ((mask_ & kD1) && sgn(d1_) == 0) mask_ &= ~kD1;
  if ((mask_ & kD2) && sgn(d2_) == 0) mask_ &= ~kD2;
  if ((mask_ & kD12) && sgn(d12_) == 0) mask_ &= ~kD12;
}

bool Jet::is_zero() const { return sgn(v_) == 0 && mask_ == 0; }

Jet& Jet::operator+=(const Jet& o) {
  v_ += o.v_;
  if (o.mask_ == 0) return *this;
  if (o.mask_ & kD1) d1_ = (mask_ & kD1) ? Q(d1_ + o.d1_) : o.d1_;
  if (o.mask_ & kD2) d2_ = (mask_ & kD2) ? Q(d2_ + o.d2_) : o.d2_;
  if (o.mask_ & kD12) d12_ = (mask_ & kD12) ? Q(d12_ + o.d12_) : o.d12_;
  mask_ |= o.mask_;
  tidy();
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  v_ -= o.v_;
  if (o.mask_ == 0) return *this;
  if (o.mask_ & kD1) d1_ = (mask_ & kD1) ? Q(d1_ - o.d1_) : Q(-o.d1_);
  if (o.mask_ & kD2) d2_ = (mask_ & kD2) ? Q(d2_ - o.d2_) : Q(-o.d2_);
  if (o.mask_ & kD12) d12_ = (mask_ & kD12) ? Q(d12_ - o.d12_) : Q(-o.d12_);
  mask_ |= o.mask_;
  tidy();
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  if (mask_ == 0 && o.mask_ == 0) {
    v_ *= o.v_;
    return *this;
  }
  Q a1 = d1(), a2 = d2(), a12 = d12();
  Q b1 = o.d1(), b2 = o.d2(), b12 = o.d12();
  Q r12 = v_ * b12 + a12 * o.v_ + a1 * b2 + a2 * b1;
  Q r1 = v_ * b1 + a1 * o.v_;
  Q r2 = v_ * b2 + a2 * o.v_;
  v_ *= o.v_;
  d1_ = std::move(r1);
  d2_ = std::move(r2);
  d12_ = std::move(r12);
  mask_ = kD1 | kD2 | kD12;
  tidy();
  return *this;
}

Jet Jet::inverse() const {
  if (sgn(v_) == 0) throw KnError(ErrorKind::ZeroDenominator, "inverse of a nilpotent jet");
  Q iv = 1 / v_;
  if (mask_ == 0) return Jet(iv);
  // (v + x)^-1 = iv - iv^2 x + iv^3 x^2, with x^2 = 2 a1 a2 eps1 eps2
  Q iv2 = iv * iv;
  Q a1 = d1(), a2 = d2(), a12 = d12();
  Q r1 = -iv2 * a1;
  Q r2 = -iv2 * a2;
  Q r12 = -iv2 * a12 + 2 * iv2 * iv * a1 * a2;
  return Jet(iv, r1, r2, r12);
}

Jet& Jet::operator/=(const Jet& o) { return *this *= o.inverse(); }

Jet Jet::operator-() const {
  Jet r(*this);
  r.v_ = -r.v_;
  if (mask_ & kD1) r.d1_ = -r.d1_;
  if (mask_ & kD2) r.d2_ = -r.d2_;
  if (mask_ & kD12) r.d12_ = -r.d12_;
  return r;
}

Jet Jet::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  Jet result(1), base(*this);
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

bool operator==(const Jet& a, const Jet& b) {
  return a.v_ == b.v_ && a.d1() == b.d1() && a.d2() == b.d2() && a.d12() == b.d12();
}

std::ostream& operator<<(std::ostream& os, const Jet& j) {
  os << to_string(j.v());
  if (!j.pure()) os << "+(" << to_string(j.d1()) << ")e1+(" << to_string(j.d2()) << ")e2+(" << to_string(j.d12()) << ")e12";
  return os;
}

Q binomial(long e, long m) {
  Q r(1);
  for (long i = 0; i < m; ++i) {
    r *= Q(e - i);
    r /= Q(i + 1);
  }
  return r;
}

}  // namespace kn
