#include "kn/poly.hpp"

#include "kn/errors.hpp"

namespace kn {

Poly::Poly(const Jet& c) {
  if (!c.is_zero()) c_.push_back(c);
}

Poly::Poly(std::vector<Jet> c) : c_(std::move(c)) { trim(); }

Poly Poly::monomial(const Jet& c, int deg) {
  std::vector<Jet> v(static_cast<size_t>(deg) + 1);
  v.back() = c;
  return Poly(std::move(v));
}

Poly Poly::linear(const Jet& root) { return Poly(std::vector<Jet>{-root, Jet(1)}); }

void Poly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

bool Poly::value_is_zero() const {
  for (const auto& x : c_)
    if (x.is_unit()) return false;
  return true;
}

Jet Poly::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(c_.size())) return Jet();
  return c_[static_cast<size_t>(i)];
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

Poly& Poly::operator*=(const Jet& s) {
  for (auto& x : c_) x *= s;
  trim();
  return *this;
}

Poly Poly::operator-() const {
  Poly r(*this);
  for (auto& x : r.c_) x = -x;
  return r;
}

Poly operator+(Poly a, const Poly& b) { return a += b; }
Poly operator-(Poly a, const Poly& b) { return a -= b; }
Poly operator*(Poly a, const Jet& s) { return a *= s; }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  std::vector<Jet> r(a.coeffs().size() + b.coeffs().size() - 1);
  for (size_t i = 0; i < a.coeffs().size(); ++i) {
    if (a.coeffs()[i].is_zero()) continue;
    for (size_t j = 0; j < b.coeffs().size(); ++j) r[i + j] += a.coeffs()[i] * b.coeffs()[j];
  }
  return Poly(std::move(r));
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly();
  std::vector<Jet> r(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Jet(static_cast<long>(i));
  return Poly(std::move(r));
}

Jet Poly::eval(const Jet& x) const {
  Jet r;
  for (size_t i = c_.size(); i-- > 0;) {
    r *= x;
    r += c_[i];
  }
  return r;
}

Poly Poly::taylor_shift(const Jet& a) const {
  // Horner in t with z = a + t
  std::vector<Jet> r(c_.size());
  for (size_t i = c_.size(); i-- > 0;) {
    // r <- r * (a + t) + c_i
    for (size_t k = c_.size() - 1; k > 0; --k) {
      r[k] *= a;
      r[k] += r[k - 1];
    }
    if (!r.empty()) {
      r[0] *= a;
      r[0] += c_[i];
    }
  }
  return Poly(std::move(r));
}

Poly Poly::pow(int e) const {
  Poly r(Jet(1)), b(*this);
  while (e > 0) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
  if (b.is_zero() || !b.lead().is_unit()) throw KnError(ErrorKind::ZeroDenominator, "division by a polynomial with non-unit leading coefficient");
  std::vector<Jet> rem(a.coeffs());
  int db = b.degree();
  int dq = a.degree() - db;
  if (dq < 0) {
    q = Poly();
    r = a;
    return;
  }
  std::vector<Jet> quo(static_cast<size_t>(dq) + 1);
  Jet il = b.lead().inverse();
  for (int k = dq; k >= 0; --k) {
    Jet f = rem[static_cast<size_t>(k + db)] * il;
    if (f.is_zero()) continue;
    quo[static_cast<size_t>(k)] = f;
    for (int j = 0; j <= db; ++j) rem[static_cast<size_t>(k + j)] -= f * b[j];
  }
  q = Poly(std::move(quo));
  r = Poly(std::move(rem));
}

bool divides(const Poly& b, const Poly& a, Poly* quotient) {
  Poly q, r;
  divmod(a, b, q, r);
  if (!r.is_zero()) return false;
  if (quotient) *quotient = q;
  return true;
}

Poly gcd(Poly a, Poly b) {
  if (a.is_zero()) std::swap(a, b);
  if (a.is_zero()) return Poly(Jet(1));
  if (!a.lead().is_unit()) return Poly(Jet(1));
  while (!b.is_zero()) {
    if (!b.lead().is_unit()) return Poly(Jet(1));
    Poly q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  if (a.degree() <= 0) return Poly(Jet(1));
  return a * a.lead().inverse();
}

}  // namespace kn
