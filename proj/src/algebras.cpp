#include "kn/algebras.hpp"

#include <algorithm>
#include <climits>

#include "kn/errors.hpp"

namespace kn {

void axpy(Expansion& y, const Jet& a, const Expansion& x) {
  if (a.is_zero()) return;
  for (const auto& [k, v] : x) {
    auto it = y.find(k);
    if (it == y.end()) {
      Jet t = a * v;
      if (!t.is_zero()) y.emplace(k, t);
    } else {
      it->second += a * v;
      if (it->second.is_zero()) y.erase(it);
    }
  }
}

Expansion scaled(const Expansion& x, const Jet& a) {
  Expansion y;
  axpy(y, a, x);
  return y;
}

Expansion clean(Expansion x) {
  std::erase_if(x, [](const auto& kv) { return kv.second.is_zero(); });
  return x;
}

void CurrentElement::add(const Matrix& x, const Expansion& a) {
  if (x.rows() != rank_ || x.cols() != rank_) throw KnError(ErrorKind::DimensionMismatch, "matrix size differs from gl rank");
  if (x.is_zero()) return;
  for (const auto& [k, c] : a) {
    if (c.is_zero()) continue;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(k, x * c);
    } else {
      it->second += x * c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
}

void CurrentElement::add(const Matrix& x, KNIndex idx) { add(x, Expansion{{idx, Jet(1)}}); }

CurrentElement& CurrentElement::operator+=(const CurrentElement& o) {
  if (o.rank_ != rank_) throw KnError(ErrorKind::DimensionMismatch, "currents of different gl rank");
  for (const auto& [k, x] : o.terms_) add(x, Expansion{{k, Jet(1)}});
  return *this;
}

CurrentElement& CurrentElement::operator-=(const CurrentElement& o) {
  if (o.rank_ != rank_) throw KnError(ErrorKind::DimensionMismatch, "currents of different gl rank");
  for (const auto& [k, x] : o.terms_) add(x, Expansion{{k, Jet(-1)}});
  return *this;
}

CurrentElement& CurrentElement::operator*=(const Jet& s) {
  if (s.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, x] : terms_) x *= s;
  std::erase_if(terms_, [](const auto& kv) { return kv.second.is_zero(); });
  return *this;
}

CurrentElement operator+(CurrentElement a, const CurrentElement& b) { return a += b; }
CurrentElement operator-(CurrentElement a, const CurrentElement& b) { return a -= b; }

KNAlgebra::KNAlgebra(GeometryPtr geo) : geo_(std::move(geo)) {}

namespace {

constexpr int kProduct = 0;
constexpr int kBracket = 1;
constexpr int kAction = 100;

std::vector<PMTerm> pm_of(const Geometry& g, int lambda, KNIndex i) {
  return {PMTerm{g.basis_constant(lambda, i.n, i.p), g.basis_exponents(lambda, i.n, i.p)}};
}

void append_scaled(std::vector<PMTerm>& out, std::vector<PMTerm> in, long s) {
  for (auto& t : in) {
    if (s != 1) t.c *= Jet(s);
    out.push_back(std::move(t));
  }
}

}  // namespace

const Expansion& KNAlgebra::cached(const Key& key) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto [kind, an, ap, bn, bp] = key;
  KNIndex a{an, ap}, b{bn, bp};
  const Geometry& g = *geo_;
  Expansion r;
  if (kind == kProduct) {
    r = g.expand(0, pm_product(pm_of(g, 0, a), pm_of(g, 0, b)));
  } else if (kind == kBracket) {
    auto ea = pm_of(g, -1, a), eb = pm_of(g, -1, b);
    std::vector<PMTerm> t = pm_product(ea, pm_derivative(eb));
    append_scaled(t, pm_product(eb, pm_derivative(ea)), -1);
    r = g.expand(-1, t);
  } else {
    int lam = kind - kAction;
    auto ea = pm_of(g, -1, a), fb = pm_of(g, lam, b);
    std::vector<PMTerm> t = pm_product(ea, pm_derivative(fb));
    if (lam != 0) append_scaled(t, pm_product(fb, pm_derivative(ea)), lam);
    r = g.expand(lam, t);
  }
  std::lock_guard<std::mutex> lk(mu_);
  return cache_.emplace(key, std::move(r)).first->second;
}

const Expansion& KNAlgebra::product(KNIndex a, KNIndex b) const {
  if (b < a) std::swap(a, b);
  return cached({kProduct, a.n, a.p, b.n, b.p});
}

const Expansion& KNAlgebra::bracket(KNIndex a, KNIndex b) const { return cached({kBracket, a.n, a.p, b.n, b.p}); }

const Expansion& KNAlgebra::action(int lambda, KNIndex a, KNIndex b) const {
  return cached({kAction + lambda, a.n, a.p, b.n, b.p});
}

Expansion KNAlgebra::multiply(const Expansion& a, const Expansion& b) const {
  Expansion r;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b) axpy(r, x * y, product(i, j));
  return r;
}

Expansion KNAlgebra::bracket(const Expansion& e, const Expansion& f) const {
  Expansion r;
  for (const auto& [i, x] : e)
    for (const auto& [j, y] : f) axpy(r, x * y, bracket(i, j));
  return r;
}

Expansion KNAlgebra::act(const Expansion& e, int lambda, const Expansion& f) const {
  Expansion r;
  for (const auto& [i, x] : e)
    for (const auto& [j, y] : f) axpy(r, x * y, action(lambda, i, j));
  return r;
}

CurrentElement KNAlgebra::bracket_currents(const CurrentElement& x, const CurrentElement& y) const {
  if (x.rank() != y.rank()) throw KnError(ErrorKind::DimensionMismatch, "currents of different gl rank");
  CurrentElement r(x.rank());
  for (const auto& [i, a] : x.terms())
    for (const auto& [j, b] : y.terms()) {
      Matrix c = commutator(a, b);
      if (c.is_zero()) continue;
      r.add(c, product(i, j));
    }
  return r;
}

CurrentElement KNAlgebra::act_on_current(const Expansion& e, const CurrentElement& x) const {
  CurrentElement r(x.rank());
  for (const auto& [j, a] : x.terms()) {
    Expansion ea;
    for (const auto& [i, c] : e) axpy(ea, c, action(0, i, j));
    r.add(a, ea);
  }
  return r;
}

DiffOpElement KNAlgebra::bracket_diffop(const DiffOpElement& a, const DiffOpElement& b) const {
  DiffOpElement r;
  r.current = bracket_currents(a.current, b.current);
  r.current += act_on_current(a.vector, b.current);
  r.current -= act_on_current(b.vector, a.current);
  r.vector = bracket(a.vector, b.vector);
  return r;
}

Expansion KNAlgebra::unit() const {
  Expansion u;
  for (int p = 1; p <= N(); ++p) u[KNIndex{0, p}] = Jet(1);
  return u;
}

int KNAlgebra::order_at_infinity(int lambda, const Expansion& f) const {
  Expansion c = clean(f);
  if (c.empty()) throw KnError(ErrorKind::UndefinedOrder, "order of the zero form");
  return form_order_at_infinity(from_expansion(c, lambda, *geo_));
}

namespace {

// Largest n0 in the scan range such that all basis elements of degree <= n0 have
// order >= need at infinity; the strip constant is max(0, -n0 - 1).
int strip_constant(const KNAlgebra& alg, int lambda, int need) {
  int n0 = INT_MIN;
  for (int n = -12; n <= 6; ++n) {
    bool ok = true;
    for (int p = 1; p <= alg.N() && ok; ++p)
      ok = form_order_at_infinity(basis_form(alg.geo(), lambda, KNIndex{n, p})) >= need;
    if (!ok) break;
    n0 = n;
  }
  if (n0 == INT_MIN) throw KnError(ErrorKind::Inconsistent, "no degree satisfies the strip condition");
  return std::max(0, -n0 - 1);
}

}  // namespace

int KNAlgebra::strip_K() const { return strip_constant(*this, 0, 1); }
int KNAlgebra::strip_L() const { return strip_constant(*this, -1, 2); }

bool KNAlgebra::member(int lambda, const Expansion& f, const SubalgebraTag& tag) const {
  Expansion c = clean(f);
  if (c.empty()) return true;
  int lo = c.begin()->first.n, hi = c.rbegin()->first.n;
  switch (tag.kind) {
    case SubalgebraKind::Plus:
      return lo >= 1;
    case SubalgebraKind::PlusStar:
      return lo >= (lambda == -1 ? -1 : 0);
    case SubalgebraKind::ZeroStrip: {
      int K = lambda == -1 ? strip_L() : strip_K();
      return lo >= -K && hi <= 0;
    }
    case SubalgebraKind::Minus: {
      int K = lambda == -1 ? strip_L() : strip_K();
      return hi <= -K - 1;
    }
    case SubalgebraKind::MinusStar:
      return order_at_infinity(lambda, c) >= 0;
    case SubalgebraKind::Regular:
      return order_at_infinity(lambda, c) >= tag.p - lambda;
  }
  return false;
}

std::vector<Expansion> KNAlgebra::regular_functions(int lo, int hi, int order_min) const {
  return regular_forms(0, lo, hi, order_min);
}

std::vector<Expansion> KNAlgebra::regular_forms(int lambda, int lo, int hi, int order_min) const {
  // weight-corrected order = order of the coefficient - 2 lambda
  order_min += 2 * lambda;
  std::vector<KNIndex> cols;
  std::vector<Laurent> series;
  int low = INT_MAX;
  for (int n = lo; n <= hi; ++n)
    for (int p = 1; p <= N(); ++p) {
      cols.push_back(KNIndex{n, p});
      Laurent s = local_series(basis_form(*geo_, lambda, KNIndex{n, p}).coeff(), Center::infinity(), order_min);
      low = std::min(low, s.lo);
      series.push_back(std::move(s));
    }
  int rows = std::max(0, order_min - low);
  Matrix m(rows, static_cast<int>(cols.size()));
  for (int j = 0; j < m.cols(); ++j)
    for (int r = 0; r < rows; ++r) m(r, j) = series[static_cast<size_t>(j)].at(low + r);
  std::vector<Expansion> out;
  if (rows == 0) {
    for (const auto& c : cols) out.push_back(Expansion{{c, Jet(1)}});
    return out;
  }
  for (const auto& v : kernel(m)) {
    Expansion e;
    for (size_t j = 0; j < v.size(); ++j)
      if (!v[j].is_zero()) e[cols[j]] = v[j];
    out.push_back(std::move(e));
  }
  return out;
}

KNForm multiply_functions(const KNForm& a, const KNForm& b) {
  if (a.weight() != 0 || b.weight() != 0) throw KnError(ErrorKind::WeightMismatch, "functions have weight 0");
  return tensor(a, b);
}

KNForm bracket_vector_fields(const KNForm& e, const KNForm& f) {
  if (e.weight() != -1 || f.weight() != -1) throw KnError(ErrorKind::WeightMismatch, "vector fields have weight -1");
  return lie_derivative(e, f);
}

StructureTable structure_constants(const KNAlgebra& alg, AlgebraKind kind, int lo, int hi) {
  StructureTable t;
  bool first = true;
  for (int n = lo; n <= hi; ++n)
    for (int p = 1; p <= alg.N(); ++p)
      for (int m = lo; m <= hi; ++m)
        for (int r = 1; r <= alg.N(); ++r) {
          KNIndex a{n, p}, b{m, r};
          const Expansion& ex = kind == AlgebraKind::Vector ? alg.bracket(a, b) : alg.product(a, b);
          for (const auto& [k, c] : ex) {
            t.entries.push_back({a, b, k, c});
            int d = k.n - n - m;
            if (first) {
              t.R = -d;
              t.S = d;
              first = false;
            } else {
              t.R = std::max(t.R, -d);
              t.S = std::max(t.S, d);
            }
          }
        }
  return t;
}

std::pair<int, int> module_bounds(const KNAlgebra& alg, int lambda, int lo, int hi) {
  int T = INT_MIN, U = INT_MIN;
  for (int n = lo; n <= hi; ++n)
    for (int p = 1; p <= alg.N(); ++p)
      for (int m = lo; m <= hi; ++m)
        for (int r = 1; r <= alg.N(); ++r)
          for (const auto& [k, c] : alg.action(lambda, KNIndex{n, p}, KNIndex{m, r})) {
            T = std::max(T, n + m - k.n);
            U = std::max(U, k.n - n - m);
          }
  if (T == INT_MIN) return {0, 0};
  return {T, U};
}

Matrix elementary(int n, int i, int j) {
  Matrix m(n, n);
  m(i, j) = Jet(1);
  return m;
}

std::string algebra_name(AlgebraKind k) {
  switch (k) {
    case AlgebraKind::Function:
      return "function";
    case AlgebraKind::Vector:
      return "vector";
    case AlgebraKind::Current:
      return "current";
  }
  return "";
}

AlgebraKind parse_algebra(const std::string& s) {
  if (s == "function") return AlgebraKind::Function;
  if (s == "vector") return AlgebraKind::Vector;
  if (s == "current") return AlgebraKind::Current;
  throw KnError(ErrorKind::Usage, "unknown algebra '" + s + "'");
}

SubalgebraTag parse_subalgebra(const std::string& s) {
  if (s == "plus") return {SubalgebraKind::Plus, 0};
  if (s == "zero_strip") return {SubalgebraKind::ZeroStrip, 0};
  if (s == "minus") return {SubalgebraKind::Minus, 0};
  if (s == "plus_star") return {SubalgebraKind::PlusStar, 0};
  if (s == "minus_star") return {SubalgebraKind::MinusStar, 0};
  if (s.rfind("regular", 0) == 0) {
    std::string rest = s.substr(7);
    if (rest.size() >= 2 && rest.front() == '(' && rest.back() == ')') rest = rest.substr(1, rest.size() - 2);
    try {
      return {SubalgebraKind::Regular, rest.empty() ? 1 : std::stoi(rest)};
    } catch (const std::exception&) {
    }
  }
  throw KnError(ErrorKind::Usage, "unknown subalgebra tag '" + s + "'");
}

}  // namespace kn
