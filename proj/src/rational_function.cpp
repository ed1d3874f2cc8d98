#include "kn/rational_function.hpp"

#include <algorithm>

#include "kn/errors.hpp"

namespace kn {

namespace {

// Largest-degree coefficient whose value part is nonzero.
Jet top_unit(const Poly& p) {
  for (int i = p.degree(); i >= 0; --i)
    if (p[i].is_unit()) return p[i];
  throw KnError(ErrorKind::ZeroDenominator, "polynomial has no unit coefficient");
}

}  // namespace

RationalFunction::RationalFunction(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
  *this = rf_normalize(*this);
}

RationalFunction RationalFunction::raw(Poly num, Poly den) {
  RationalFunction r;
  r.num_ = std::move(num);
  r.den_ = std::move(den);
  return r;
}

RationalFunction rf_normalize(const RationalFunction& f) {
  if (f.den().value_is_zero()) throw KnError(ErrorKind::ZeroDenominator, "denominator vanishes");
  if (f.num().is_zero()) return RationalFunction::raw(Poly(), Poly(Jet(1)));
  Poly num = f.num(), den = f.den();
  if (den.degree() > 0 && num.degree() > 0) {
    // Euclid over jets; cancellation only when the division is exact.
    Poly g = gcd(num, den);
    Poly qn, qd;
    if (g.degree() > 0 && divides(g, num, &qn) && divides(g, den, &qd)) {
      num = std::move(qn);
      den = std::move(qd);
    }
  }
  Jet s = top_unit(den).inverse();
  num *= s;
  den *= s;
  return RationalFunction::raw(std::move(num), std::move(den));
}

RationalFunction& RationalFunction::operator+=(const RationalFunction& o) {
  if (den_ == o.den_) {
    *this = RationalFunction(num_ + o.num_, den_);
  } else {
    *this = RationalFunction(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  }
  return *this;
}

RationalFunction& RationalFunction::operator-=(const RationalFunction& o) { return *this += -o; }

RationalFunction& RationalFunction::operator*=(const RationalFunction& o) {
  *this = RationalFunction(num_ * o.num_, den_ * o.den_);
  return *this;
}

RationalFunction& RationalFunction::operator*=(const Jet& s) {
  num_ *= s;
  return *this;
}

RationalFunction RationalFunction::operator-() const { return raw(-num_, den_); }

RationalFunction RationalFunction::inverse() const { return RationalFunction(den_, num_); }

RationalFunction RationalFunction::derivative() const {
  return RationalFunction(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
}

Jet RationalFunction::eval(const Jet& x) const { return num_.eval(x) / den_.eval(x); }

bool operator==(const RationalFunction& a, const RationalFunction& b) {
  return a.num_ * b.den_ == b.num_ * a.den_;
}

RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
RationalFunction operator*(RationalFunction a, const Jet& s) { return a *= s; }
RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) { return a * b.inverse(); }

Jet Laurent::at(int e) const {
  if (e < lo || e >= lo + static_cast<int>(c.size())) return Jet();
  return c[static_cast<size_t>(e - lo)];
}

int Laurent::valuation() const {
  for (size_t i = 0; i < c.size(); ++i)
    if (lo + static_cast<int>(i) >= prec) break;
    else if (!c[i].is_zero()) return lo + static_cast<int>(i);
  return prec;
}

void Laurent::trim_front() {
  size_t k = 0;
  while (k < c.size() && c[k].is_zero()) ++k;
  c.erase(c.begin(), c.begin() + static_cast<long>(k));
  lo += static_cast<int>(k);
  while (!c.empty() && c.back().is_zero()) c.pop_back();
}

Laurent laurent_from_poly(const Poly& p, int shift) {
  Laurent l;
  l.lo = shift;
  l.c = p.coeffs();
  l.trim_front();
  return l;
}

Laurent laurent_mul(const Laurent& a, const Laurent& b, int prec) {
  Laurent r;
  int va = a.valuation(), vb = b.valuation();
  r.prec = prec;
  if (a.prec < Laurent::kExact && vb < Laurent::kExact) r.prec = std::min(r.prec, a.prec + vb);
  if (b.prec < Laurent::kExact && va < Laurent::kExact) r.prec = std::min(r.prec, b.prec + va);
  r.lo = a.lo + b.lo;
  int hi = a.lo + static_cast<int>(a.c.size()) + b.lo + static_cast<int>(b.c.size()) - 1;
  hi = std::min(hi, r.prec);
  if (hi <= r.lo) {
    r.c.clear();
    return r;
  }
  r.c.assign(static_cast<size_t>(hi - r.lo), Jet());
  for (size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i].is_zero()) continue;
    for (size_t j = 0; j < b.c.size(); ++j) {
      size_t k = i + j;
      if (k >= r.c.size()) break;
      r.c[k] += a.c[i] * b.c[j];
    }
  }
  r.trim_front();
  return r;
}

Laurent laurent_inverse(const Laurent& a, int prec) {
  // a = t^e (U + eta') with U(0) a unit and eta' nilpotent in negative powers
  int e = Laurent::kExact;
  size_t ie = 0;
  for (size_t i = 0; i < a.c.size(); ++i) {
    if (a.lo + static_cast<int>(i) >= a.prec) break;
    if (a.c[i].is_unit()) {
      e = a.lo + static_cast<int>(i);
      ie = i;
      break;
    }
  }
  if (e == Laurent::kExact) throw KnError(ErrorKind::ZeroDenominator, "series has no unit coefficient in its known range");
  int m = e - a.lo;  // depth of the nilpotent head
  int want = prec + e + 2 * m + 1;
  int have = a.prec >= Laurent::kExact ? Laurent::kExact : a.prec - e;
  int len = std::max(1, std::min(want, have));
  std::vector<Jet> u;
  for (size_t i = ie; i < a.c.size() && static_cast<int>(u.size()) < len; ++i) u.push_back(a.c[i]);
  Laurent inv;
  inv.lo = 0;
  inv.prec = len;
  inv.c.assign(static_cast<size_t>(len), Jet());
  Jet i0 = u[0].inverse();
  inv.c[0] = i0;
  for (int k = 1; k < len; ++k) {
    Jet s;
    for (int j = 1; j <= k && j < static_cast<int>(u.size()); ++j) s += u[static_cast<size_t>(j)] * inv.c[static_cast<size_t>(k - j)];
    inv.c[static_cast<size_t>(k)] = -(i0 * s);
  }
  if (a.prec >= Laurent::kExact && want <= have) inv.prec = len;
  Laurent result = inv;
  if (m > 0) {
    Laurent eta;
    eta.lo = -m;
    eta.c.assign(a.c.begin(), a.c.begin() + m);
    Laurent x = laurent_mul(inv, eta, Laurent::kExact);
    Laurent x2 = laurent_mul(x, x, Laurent::kExact);
    // 1 - x + x^2, exact: x has only nilpotent coefficients
    Laurent corr;
    int lo = std::min({0, x.lo, x2.lo});
    int hi = std::max({1, x.lo + static_cast<int>(x.c.size()), x2.lo + static_cast<int>(x2.c.size())});
    corr.lo = lo;
    corr.c.assign(static_cast<size_t>(hi - lo), Jet());
    corr.c[static_cast<size_t>(-lo)] += Jet(1);
    for (size_t i = 0; i < x.c.size(); ++i) corr.c[static_cast<size_t>(x.lo - lo) + i] -= x.c[i];
    for (size_t i = 0; i < x2.c.size(); ++i) corr.c[static_cast<size_t>(x2.lo - lo) + i] += x2.c[i];
    corr.prec = std::min(x.prec, x2.prec);
    result = laurent_mul(inv, corr, Laurent::kExact);
  }
  result.lo -= e;
  if (result.prec < Laurent::kExact) result.prec -= e;
  result.prec = std::min(result.prec, prec);
  while (!result.c.empty() && result.lo + static_cast<int>(result.c.size()) > result.prec) result.c.pop_back();
  return result;
}

namespace {

Laurent poly_at_infinity(const Poly& p) {
  // p(1/w) = sum p_i w^-i
  Laurent l;
  if (p.is_zero()) return l;
  l.lo = -p.degree();
  l.c.assign(p.coeffs().rbegin(), p.coeffs().rend());
  l.trim_front();
  return l;
}

}  // namespace

Laurent local_series(const RationalFunction& f, const Center& c, int prec) {
  Laurent n, d;
  if (c.infinite) {
    n = poly_at_infinity(f.num());
    d = poly_at_infinity(f.den());
  } else {
    n = laurent_from_poly(f.num().taylor_shift(c.point));
    d = laurent_from_poly(f.den().taylor_shift(c.point));
  }
  if (n.c.empty()) {
    Laurent z;
    z.prec = prec;
    return z;
  }
  int vn = n.valuation();
  Laurent di = laurent_inverse(d, prec - vn);
  return laurent_mul(n, di, prec);
}

LaurentExpansion laurent_expand(const RationalFunction& f, const Center& c, int depth) {
  LaurentExpansion out;
  out.center = c;
  if (f.is_zero()) return out;
  int ord = order_at(f, c);
  Laurent s = local_series(f, c, ord + std::max(depth, 1));
  out.leading_order = ord;
  for (int i = 0; i < depth; ++i) out.coefficients.push_back(s.at(ord + i));
  return out;
}

int order_at(const RationalFunction& f, const Center& c) {
  if (f.is_zero()) throw KnError(ErrorKind::UndefinedOrder, "order of the zero function");
  Laurent n = c.infinite ? poly_at_infinity(f.num()) : laurent_from_poly(f.num().taylor_shift(c.point));
  Laurent d = c.infinite ? poly_at_infinity(f.den()) : laurent_from_poly(f.den().taylor_shift(c.point));
  int e = d.lo;
  for (size_t i = 0; i < d.c.size(); ++i)
    if (d.c[i].is_unit()) {
      e = d.lo + static_cast<int>(i);
      break;
    }
  int guess = n.valuation() - e + 1;
  for (int extra = 0; extra < 64; extra += 4) {
    Laurent s = local_series(f, c, guess + extra);
    int v = s.valuation();
    if (v < s.prec) return v;
  }
  throw KnError(ErrorKind::UndefinedOrder, "no nonzero coefficient found");
}

Jet residue_at(const RationalFunction& f, const Jet& c) {
  if (f.is_zero()) return Jet();
  Laurent s = local_series(f, Center::at(c), 0);
  return s.at(-1);
}

}  // namespace kn
