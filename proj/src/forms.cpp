#include "kn/forms.hpp"

#include <algorithm>
#include <climits>

#include "kn/errors.hpp"

namespace kn {

namespace {

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

RationalFunction pm_to_rf(const MarkedConfig& cfg, const PMTerm& t) {
  Poly num(t.c), den(Jet(1));
  for (int j = 0; j < cfg.N(); ++j) {
    int e = t.e[static_cast<size_t>(j)];
    if (e > 0) num = num * Poly::linear(cfg.points[static_cast<size_t>(j)]).pow(e);
    if (e < 0) den = den * Poly::linear(cfg.points[static_cast<size_t>(j)]).pow(-e);
  }
  return RationalFunction::raw(std::move(num), std::move(den));
}

RationalFunction pm_sum_to_rf(const MarkedConfig& cfg, const std::vector<PMTerm>& ts) {
  // Common denominator prod (z - z_j)^(-min e_j)
  if (ts.empty()) return RationalFunction();
  int n = cfg.N();
  std::vector<int> lo(static_cast<size_t>(n), 0);
  for (const auto& t : ts)
    for (int j = 0; j < n; ++j) lo[static_cast<size_t>(j)] = std::min(lo[static_cast<size_t>(j)], t.e[static_cast<size_t>(j)]);
  Poly num, den(Jet(1));
  for (int j = 0; j < n; ++j)
    if (lo[static_cast<size_t>(j)] < 0) den = den * Poly::linear(cfg.points[static_cast<size_t>(j)]).pow(-lo[static_cast<size_t>(j)]);
  for (const auto& t : ts) {
    Poly p(t.c);
    for (int j = 0; j < n; ++j) {
      int e = t.e[static_cast<size_t>(j)] - lo[static_cast<size_t>(j)];
      if (e > 0) p = p * Poly::linear(cfg.points[static_cast<size_t>(j)]).pow(e);
    }
    num += p;
  }
  return RationalFunction(std::move(num), std::move(den));
}

}  // namespace

std::vector<PMTerm> pm_derivative(const std::vector<PMTerm>& ts) {
  std::vector<PMTerm> out;
  for (const auto& t : ts)
    for (size_t j = 0; j < t.e.size(); ++j) {
      if (t.e[j] == 0) continue;
      PMTerm d{t.c * Jet(static_cast<long>(t.e[j])), t.e};
      d.e[j] -= 1;
      out.push_back(std::move(d));
    }
  return out;
}

std::vector<PMTerm> pm_product(const std::vector<PMTerm>& a, const std::vector<PMTerm>& b) {
  std::vector<PMTerm> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) {
      PMTerm t{x.c * y.c, x.e};
      for (size_t j = 0; j < t.e.size(); ++j) t.e[j] += y.e[j];
      out.push_back(std::move(t));
    }
  return out;
}

void MarkedConfig::validate() const {
  if (points.empty()) throw KnError(ErrorKind::Usage, "at least one marked point is required");
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j)
      if (points[i].v() == points[j].v()) throw KnError(ErrorKind::Usage, "marked points must be distinct");
}

MarkedConfig MarkedConfig::from_rationals(const std::vector<Q>& pts) {
  MarkedConfig c;
  for (const auto& q : pts) c.points.emplace_back(q);
  c.validate();
  return c;
}

KNForm& KNForm::operator+=(const KNForm& o) {
  if (weight_ != o.weight_) throw KnError(ErrorKind::WeightMismatch, "adding forms of different weight");
  coeff_ += o.coeff_;
  if (pm_ && o.pm_)
    pm_->insert(pm_->end(), o.pm_->begin(), o.pm_->end());
  else
    pm_.reset();
  return *this;
}

KNForm& KNForm::operator-=(const KNForm& o) { return *this += -o; }

KNForm& KNForm::operator*=(const Jet& s) {
  coeff_ *= s;
  if (pm_)
    for (auto& t : *pm_) t.c *= s;
  return *this;
}

KNForm KNForm::operator-() const {
  KNForm r(*this);
  r *= Jet(-1);
  return r;
}

KNForm operator+(KNForm a, const KNForm& b) { return a += b; }
KNForm operator-(KNForm a, const KNForm& b) { return a -= b; }
KNForm operator*(KNForm a, const Jet& s) { return a *= s; }

KNForm tensor(const KNForm& a, const KNForm& b) {
  RationalFunction c = a.coeff() * b.coeff();
  int w = a.weight() + b.weight();
  if (a.pm() && b.pm()) return KNForm(w, c, pm_product(*a.pm(), *b.pm()));
  return KNForm(w, c);
}

KNForm coeff_derivative(const KNForm& a) {
  if (a.pm()) return KNForm(a.weight(), a.coeff().derivative(), pm_derivative(*a.pm()));
  KNForm r(a.weight(), a.coeff().derivative());
  return r;
}

Geometry::Geometry(MarkedConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  int n = cfg_.N();
  inv_diff_.assign(static_cast<size_t>(n), std::vector<Jet>(static_cast<size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) inv_diff_[static_cast<size_t>(i)][static_cast<size_t>(j)] = (cfg_.points[static_cast<size_t>(i)] - cfg_.points[static_cast<size_t>(j)]).inverse();
}

GeometryPtr make_geometry(const MarkedConfig& cfg) { return std::make_shared<const Geometry>(cfg); }

Jet Geometry::residue(const std::vector<int>& E, int i) const {
  int ei = E[static_cast<size_t>(i)];
  if (ei >= 0) return Jet();
  int K = -ei - 1;
  // prod_{j != i} (a_j + t)^E_j, a_j = z_i - z_j, truncated at t^K
  std::vector<Jet> s(static_cast<size_t>(K) + 1);
  s[0] = Jet(1);
  for (int j = 0; j < N(); ++j) {
    if (j == i) continue;
    int e = E[static_cast<size_t>(j)];
    if (e == 0) continue;
    const Jet& ia = inv_diff_[static_cast<size_t>(i)][static_cast<size_t>(j)];
    Jet a = cfg_.points[static_cast<size_t>(i)] - cfg_.points[static_cast<size_t>(j)];
    std::vector<Jet> f(static_cast<size_t>(K) + 1);
    Jet lead = a.pow(e);
    Jet iap(1);
    for (int m = 0; m <= K; ++m) {
      Q b = binomial(e, m);
      if (sgn(b) != 0) f[static_cast<size_t>(m)] = lead * iap * Jet(b);
      iap *= ia;
    }
    std::vector<Jet> r(static_cast<size_t>(K) + 1);
    for (int x = 0; x <= K; ++x) {
      if (s[static_cast<size_t>(x)].is_zero()) continue;
      for (int y = 0; x + y <= K; ++y) r[static_cast<size_t>(x + y)] += s[static_cast<size_t>(x)] * f[static_cast<size_t>(y)];
    }
    s = std::move(r);
  }
  return s[static_cast<size_t>(K)];
}

Jet Geometry::cycle(const std::vector<int>& E) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cycle_cache_.find(E);
    if (it != cycle_cache_.end()) return it->second;
  }
  Jet sum;
  for (int i = 0; i < N(); ++i) sum += residue(E, i);
  std::lock_guard<std::mutex> lk(mu_);
  cycle_cache_.emplace(E, sum);
  return sum;
}

std::vector<int> Geometry::basis_exponents(int lambda, int n, int p) const {
  std::vector<int> e(static_cast<size_t>(N()), n + 1 - lambda);
  e[static_cast<size_t>(p - 1)] -= 1;
  return e;
}

Jet Geometry::basis_constant(int lambda, int n, int p) const {
  auto key = std::make_tuple(lambda, n, p);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = const_cache_.find(key);
    if (it != const_cache_.end()) return it->second;
  }
  Jet c(1);
  for (int j = 0; j < N(); ++j) {
    if (j == p - 1) continue;
    c *= inv_diff_[static_cast<size_t>(p - 1)][static_cast<size_t>(j)].pow(n + 1 - lambda);
  }
  std::lock_guard<std::mutex> lk(mu_);
  const_cache_.emplace(key, c);
  return c;
}

std::pair<int, int> Geometry::window(int lambda, const std::vector<PMTerm>& terms) const {
  int lo = INT_MAX, smax = INT_MIN;
  for (const auto& t : terms) {
    if (t.c.is_zero()) continue;
    int s = 0;
    for (int x : t.e) {
      lo = std::min(lo, x + lambda);
      s += x;
    }
    smax = std::max(smax, s);
  }
  if (lo == INT_MAX) return {0, -1};
  int hi = lambda + static_cast<int>(floor_div(smax, N()));
  return {lo, hi};
}

Expansion Geometry::expand(int lambda, const std::vector<PMTerm>& terms) const {
  Expansion out;
  auto [lo, hi] = window(lambda, terms);
  for (int l = lo; l <= hi; ++l)
    for (int s = 1; s <= N(); ++s) {
      std::vector<int> de = basis_exponents(1 - lambda, -l, s);
      Jet dc = basis_constant(1 - lambda, -l, s);
      Jet v;
      for (const auto& t : terms) {
        if (t.c.is_zero()) continue;
        std::vector<int> e = t.e;
        for (size_t j = 0; j < e.size(); ++j) e[j] += de[j];
        v += t.c * cycle(e);
      }
      v *= dc;
      if (!v.is_zero()) out[KNIndex{l, s}] = v;
    }
  return out;
}

KNForm basis_form(const Geometry& g, int lambda, KNIndex idx) {
  if (idx.p < 1 || idx.p > g.N()) throw KnError(ErrorKind::Usage, "point index out of range");
  PMTerm t{g.basis_constant(lambda, idx.n, idx.p), g.basis_exponents(lambda, idx.n, idx.p)};
  RationalFunction rf = pm_to_rf(g.cfg(), t);
  return KNForm(lambda, rf, {t});
}

KNForm basis_form(const MarkedConfig& cfg, int lambda, KNIndex idx) {
  Geometry g(cfg);
  return basis_form(g, lambda, idx);
}

int form_order_at_point(const KNForm& f, const MarkedConfig& cfg, int i) {
  return order_at(f.coeff(), Center::at(cfg.points[static_cast<size_t>(i)]));
}

int form_order_at_infinity(const KNForm& f) { return order_at(f.coeff(), Center::infinity()) - 2 * f.weight(); }

Jet residue_at_infinity_sum(const KNForm& w) {
  // sum over in-points = -res_inf = coefficient of z^-1 at infinity = coefficient of w^1
  Laurent s = local_series(w.coeff(), Center::infinity(), 2);
  return s.at(1);
}

Jet kn_pairing(const KNForm& f, const KNForm& g, const Geometry& geo) {
  if (f.weight() + g.weight() != 1) throw KnError(ErrorKind::WeightMismatch, "pairing needs weights summing to 1");
  if (f.pm() && g.pm()) {
    Jet s;
    for (const auto& a : *f.pm())
      for (const auto& b : *g.pm()) {
        std::vector<int> e = a.e;
        for (size_t j = 0; j < e.size(); ++j) e[j] += b.e[j];
        s += a.c * b.c * geo.cycle(e);
      }
    return s;
  }
  RationalFunction w = f.coeff() * g.coeff();
  Jet s;
  for (const auto& p : geo.cfg().points) s += residue_at(w, p);
  return s;
}

Jet kn_pairing(const KNForm& f, const KNForm& g, const MarkedConfig& cfg) {
  Geometry geo(cfg);
  return kn_pairing(f, g, geo);
}

KNForm lie_derivative(const KNForm& e, const KNForm& f) {
  if (e.weight() != -1) throw KnError(ErrorKind::WeightMismatch, "Lie derivative needs a vector field");
  int lam = f.weight();
  RationalFunction c = e.coeff() * f.coeff().derivative() + f.coeff() * e.coeff().derivative() * Jet(static_cast<long>(lam));
  if (e.pm() && f.pm()) {
    std::vector<PMTerm> t = pm_product(*e.pm(), pm_derivative(*f.pm()));
    if (lam != 0) {
      std::vector<PMTerm> u = pm_product(*f.pm(), pm_derivative(*e.pm()));
      for (auto& x : u) x.c *= Jet(static_cast<long>(lam));
      t.insert(t.end(), u.begin(), u.end());
    }
    return KNForm(lam, c, std::move(t));
  }
  return KNForm(lam, c);
}

namespace {

DegreeWindow window_from_orders(const KNForm& f, const Geometry& geo) {
  DegreeWindow w;
  if (f.is_zero()) return w;
  int lam = f.weight();
  int lo = INT_MAX;
  for (int i = 0; i < geo.N(); ++i) lo = std::min(lo, form_order_at_point(f, geo.cfg(), i) + lam);
  int oi = form_order_at_infinity(f);
  w.lo = lo;
  w.hi = lam + static_cast<int>(floor_div(-oi - 2 * lam, geo.N()));
  return w;
}

}  // namespace

Expansion expand_in_basis(const KNForm& f, const Geometry& geo, std::optional<DegreeWindow> window, bool verify) {
  Expansion out;
  if (f.is_zero()) return out;
  int lam = f.weight();
  DegreeWindow w;
  if (window) {
    w = *window;
  } else if (f.pm()) {
    auto [lo, hi] = geo.window(lam, *f.pm());
    w = {lo, hi};
  } else {
    w = window_from_orders(f, geo);
  }
  for (int l = w.lo; l <= w.hi; ++l)
    for (int s = 1; s <= geo.N(); ++s) {
      Jet v = kn_pairing(f, basis_form(geo, 1 - lam, KNIndex{-l, s}), geo);
      if (!v.is_zero()) out[KNIndex{l, s}] = v;
    }
  if (verify || window) {
    KNForm r = f - from_expansion(out, lam, geo);
    if (!r.is_zero()) throw KnError(ErrorKind::WindowTooSmall, "residual after expansion is nonzero");
  }
  return out;
}

KNForm from_expansion(const Expansion& ex, int lambda, const Geometry& geo) {
  std::vector<PMTerm> terms;
  for (const auto& [idx, c] : ex) {
    PMTerm t{c * geo.basis_constant(lambda, idx.n, idx.p), geo.basis_exponents(lambda, idx.n, idx.p)};
    terms.push_back(std::move(t));
  }
  if (terms.empty()) return KNForm(lambda, RationalFunction(), {});
  return KNForm(lambda, pm_sum_to_rf(geo.cfg(), terms), terms);
}

}  // namespace kn
