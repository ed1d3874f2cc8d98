#include "kn/cocycles.hpp"

#include <algorithm>
#include <climits>

#include "kn/errors.hpp"

namespace kn {

namespace {

using Terms = std::vector<PMTerm>;

Terms pm_of(const Geometry& g, int lambda, KNIndex i) {
  return {PMTerm{g.basis_constant(lambda, i.n, i.p), g.basis_exponents(lambda, i.n, i.p)}};
}

Terms d(const Terms& t, int times = 1) {
  Terms r = t;
  for (int k = 0; k < times; ++k) r = pm_derivative(r);
  return r;
}

void append(Terms& out, Terms in, const Jet& s) {
  for (auto& t : in) {
    t.c *= s;
    out.push_back(std::move(t));
  }
}

Jet pm_cycle(const Terms& ts, const Geometry& geo) {
  Jet s;
  for (const auto& t : ts)
    if (!t.c.is_zero()) s += t.c * geo.cycle(t.e);
  return s;
}

// Integrand pieces in point-monomial form.
Terms vector_integrand(const Terms& e, const Terms& f, const Terms& R) {
  Terms t;
  append(t, pm_product(d(e, 3), f), Jet(Q(1, 2)));
  append(t, pm_product(e, d(f, 3)), Jet(Q(-1, 2)));
  if (!R.empty()) {
    append(t, pm_product(R, pm_product(d(e), f)), Jet(-1));
    append(t, pm_product(R, pm_product(e, d(f))), Jet(1));
  }
  return t;
}

Terms mixing_integrand(const Terms& e, const Terms& g, const Terms& T) {
  Terms t = pm_product(e, d(g, 2));
  if (!T.empty()) append(t, pm_product(T, pm_product(e, d(g))), Jet(1));
  return t;
}

Jet integrate(const KNForm& w, const Geometry& geo) {
  if (w.pm()) return pm_cycle(*w.pm(), geo);
  Jet s;
  for (const auto& p : geo.cfg().points) s += residue_at(w.coeff(), p);
  return s;
}

KNForm as_integrand(const KNForm& f) { return f.pm() ? KNForm(1, f.coeff(), *f.pm()) : KNForm(1, f.coeff()); }

KNForm deriv(const KNForm& f, int times = 1) {
  KNForm r = f;
  for (int k = 0; k < times; ++k) r = coeff_derivative(r);
  return r;
}

void check_weight(const KNForm& f, int w, const char* what) {
  if (f.weight() != w) throw KnError(ErrorKind::WeightMismatch, what);
}

Terms connection_terms(const std::optional<KNForm>& c) {
  if (!c || c->is_zero()) return {};
  if (!c->pm()) throw KnError(ErrorKind::Usage, "connections must be given over the KN basis");
  return *c->pm();
}

}  // namespace

Jet cycle_integral(const KNForm& w, const Geometry& geo) {
  check_weight(w, 1, "cycle integrals need a weight-1 form");
  return integrate(w, geo);
}

Jet trace(const Matrix& x) {
  Jet s;
  for (int i = 0; i < std::min(x.rows(), x.cols()); ++i) s += x(i, i);
  return s;
}

Jet BilinearFormGL::operator()(const Matrix& x, const Matrix& y) const {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw KnError(ErrorKind::DimensionMismatch, "matrices of different size");
  Jet v;
  if (!r1.is_zero()) v += r1 * trace(x * y);
  if (!r2.is_zero()) v += r2 * trace(x) * trace(y);
  return v;
}

Jet cocycle_function(const KNForm& a, const KNForm& b, const Geometry& geo) {
  check_weight(a, 0, "function cocycle needs functions");
  check_weight(b, 0, "function cocycle needs functions");
  return integrate(as_integrand(tensor(a, deriv(b))), geo);
}

Jet cocycle_vector(const KNForm& e, const KNForm& f, const Geometry& geo, const Connections& conn) {
  check_weight(e, -1, "vector cocycle needs vector fields");
  check_weight(f, -1, "vector cocycle needs vector fields");
  KNForm w = as_integrand(tensor(deriv(e, 3), f) * Jet(Q(1, 2)) - tensor(e, deriv(f, 3)) * Jet(Q(1, 2)));
  if (conn.R && !conn.R->is_zero()) {
    KNForm r(0, conn.R->coeff());
    if (conn.R->pm()) r = KNForm(0, conn.R->coeff(), *conn.R->pm());
    w -= as_integrand(tensor(r, tensor(deriv(e), f) - tensor(e, deriv(f))));
  }
  return integrate(w, geo) * Jet(Q(1, 12));
}

Jet cocycle_mixing(const KNForm& e, const KNForm& a, const Geometry& geo, const Connections& conn) {
  check_weight(e, -1, "mixing cocycle needs a vector field");
  check_weight(a, 0, "mixing cocycle needs a function");
  KNForm w = as_integrand(tensor(e, deriv(a, 2)));
  if (conn.T && !conn.T->is_zero()) {
    KNForm t(0, conn.T->coeff());
    if (conn.T->pm()) t = KNForm(0, conn.T->coeff(), *conn.T->pm());
    w += as_integrand(tensor(t, tensor(e, deriv(a))));
  }
  return integrate(w, geo);
}

Cocycles::Cocycles(GeometryPtr geo, Connections conn) : geo_(std::move(geo)), conn_(std::move(conn)) {
  if (conn_.R && conn_.R->weight() != 2) throw KnError(ErrorKind::WeightMismatch, "projective connection has weight 2");
  if (conn_.T && conn_.T->weight() != 1) throw KnError(ErrorKind::WeightMismatch, "affine connection has weight 1");
  R_ = connection_terms(conn_.R);
  T_ = connection_terms(conn_.T);
}

Jet Cocycles::function(KNIndex a, KNIndex b) const {
  auto key = std::make_tuple(0, a.n, a.p, b.n, b.p);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Jet v = pm_cycle(pm_product(pm_of(*geo_, 0, a), d(pm_of(*geo_, 0, b))), *geo_);
  std::lock_guard<std::mutex> lk(mu_);
  cache_.emplace(key, v);
  return v;
}

Jet Cocycles::vector(KNIndex a, KNIndex b) const {
  auto key = std::make_tuple(1, a.n, a.p, b.n, b.p);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Jet v = pm_cycle(vector_integrand(pm_of(*geo_, -1, a), pm_of(*geo_, -1, b), R_), *geo_) * Jet(Q(1, 12));
  std::lock_guard<std::mutex> lk(mu_);
  cache_.emplace(key, v);
  return v;
}

Jet Cocycles::mixing(KNIndex e, KNIndex a) const {
  auto key = std::make_tuple(2, e.n, e.p, a.n, a.p);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Jet v = pm_cycle(mixing_integrand(pm_of(*geo_, -1, e), pm_of(*geo_, 0, a), T_), *geo_);
  std::lock_guard<std::mutex> lk(mu_);
  cache_.emplace(key, v);
  return v;
}

Jet Cocycles::function(const Expansion& a, const Expansion& b) const {
  Jet s;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b) s += x * y * function(i, j);
  return s;
}

Jet Cocycles::vector(const Expansion& e, const Expansion& f) const {
  Jet s;
  for (const auto& [i, x] : e)
    for (const auto& [j, y] : f) s += x * y * vector(i, j);
  return s;
}

Jet Cocycles::mixing(const Expansion& e, const Expansion& a) const {
  Jet s;
  for (const auto& [i, x] : e)
    for (const auto& [j, y] : a) s += x * y * mixing(i, j);
  return s;
}

Jet Cocycles::current(const CurrentElement& x, const CurrentElement& y, const BilinearFormGL& alpha) const {
  if (x.rank() != y.rank()) throw KnError(ErrorKind::DimensionMismatch, "currents of different gl rank");
  Jet s;
  for (const auto& [i, a] : x.terms())
    for (const auto& [j, b] : y.terms()) {
      Jet g = function(i, j);
      if (g.is_zero()) continue;
      s += alpha(a, b) * g;
    }
  return s;
}

Jet diffop_cocycle(const Cocycles& c, const DiffOpElement& a, const DiffOpElement& b, const CocycleCombination& w) {
  Jet s = c.current(a.current, b.current, w.alpha);
  if (!w.r_vector.is_zero()) s += w.r_vector * c.vector(a.vector, b.vector);
  if (!w.r_mixing.is_zero()) {
    auto traced = [](const CurrentElement& x) {
      Expansion t;
      for (const auto& [k, m] : x.terms()) axpy(t, trace(m), Expansion{{k, Jet(1)}});
      return t;
    };
    s += w.r_mixing * (c.mixing(a.vector, traced(b.current)) - c.mixing(b.vector, traced(a.current)));
  }
  return s;
}

AffineElement affine_bracket(const KNAlgebra& alg, const Cocycles& c, const AffineElement& x, const AffineElement& y,
                             const BilinearFormGL& alpha) {
  AffineElement r;
  r.current = alg.bracket_currents(x.current, y.current);
  r.central = c.current(x.current, y.current, alpha);
  return r;
}

LocalityReport check_local(const BasisCocycle& gamma, int N, int lo, int hi) {
  LocalityReport rep;
  for (int n = lo; n <= hi; ++n)
    for (int p = 1; p <= N; ++p)
      for (int m = lo; m <= hi; ++m)
        for (int r = 1; r <= N; ++r) {
          ++rep.pairs;
          if (gamma(KNIndex{n, p}, KNIndex{m, r}).is_zero()) continue;
          ++rep.nonzero;
          int s = n + m;
          rep.upper = rep.upper ? std::max(*rep.upper, s) : s;
          rep.lower = rep.lower ? std::min(*rep.lower, s) : s;
        }
  if (rep.upper) rep.is_local = *rep.upper < 2 * hi && *rep.lower > 2 * lo;
  return rep;
}

CoboundaryResult coboundary_solve(const BasisCocycle& difference, const std::function<Expansion(KNIndex, KNIndex)>& bracket,
                                  const std::vector<KNIndex>& left, const std::vector<KNIndex>& right) {
  std::vector<std::pair<KNIndex, KNIndex>> pairs;
  for (const auto& a : left)
    for (const auto& b : right) pairs.emplace_back(a, b);
  std::vector<Expansion> brackets;
  std::map<KNIndex, int> unknowns;
  for (const auto& [a, b] : pairs) {
    brackets.push_back(bracket(a, b));
    for (const auto& [k, c] : brackets.back()) unknowns.emplace(k, 0);
  }
  int u = 0;
  for (auto& [k, idx] : unknowns) idx = u++;
  const int P = static_cast<int>(pairs.size());
  Matrix m(P, u);
  std::vector<Jet> rhs(static_cast<size_t>(P));
  for (int i = 0; i < P; ++i) {
    for (const auto& [k, c] : brackets[static_cast<size_t>(i)]) m(i, unknowns.at(k)) = c;
    rhs[static_cast<size_t>(i)] = difference(pairs[static_cast<size_t>(i)].first, pairs[static_cast<size_t>(i)].second);
  }
  CoboundaryResult res;
  if (auto x = solve(m, rhs)) {
    res.ok = true;
    for (const auto& [k, idx] : unknowns)
      if (!(*x)[static_cast<size_t>(idx)].is_zero()) res.phi[k] = (*x)[static_cast<size_t>(idx)];
    return res;
  }
  // Residual of the right-hand side modulo the column span.
  std::vector<std::vector<Jet>> cols(static_cast<size_t>(u), std::vector<Jet>(static_cast<size_t>(P)));
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < u; ++j) cols[static_cast<size_t>(j)][static_cast<size_t>(i)] = m(i, j);
  Echelon e = echelon(cols, P);
  res.obstruction = rhs;
  e.reduce(res.obstruction);
  return res;
}

std::vector<KNIndex> indices_in_window(int N, int lo, int hi) {
  std::vector<KNIndex> v;
  for (int n = lo; n <= hi; ++n)
    for (int p = 1; p <= N; ++p) v.push_back(KNIndex{n, p});
  return v;
}

}  // namespace kn
