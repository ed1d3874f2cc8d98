#include "kn/blocks.hpp"

#include <algorithm>
#include <numeric>

#include "kn/errors.hpp"

namespace kn {

MarkedConfig with_directions(const MarkedConfig& base, const std::vector<ModuliDirection>& dirs) {
  MarkedConfig c = base;
  for (const auto& d : dirs) {
    if (d.point < 1 || d.point > c.N()) throw KnError(ErrorKind::Usage, "direction point out of range");
    if (d.slot != 1 && d.slot != 2) throw KnError(ErrorKind::Usage, "jet slot must be 1 or 2");
    c.points[static_cast<size_t>(d.point - 1)] += d.slot == 1 ? Jet::eps1() : Jet::eps2();
  }
  return c;
}

Jet d_slot(const Jet& j, int slot) { return slot == 1 ? j.part1() : j.part2(); }

Expansion d_slot(const Expansion& e, int slot) {
  Expansion out;
  for (const auto& [k, a] : e) {
    Jet d = d_slot(a, slot);
    if (!d.is_zero()) out.emplace(k, d);
  }
  return out;
}

WedgeVector d_slot(const WedgeVector& v, int slot) {
  WedgeVector out;
  for (const auto& [m, a] : v) {
    Jet d = d_slot(a, slot);
    if (!d.is_zero()) out.emplace(m, d);
  }
  return out;
}

Matrix d_slot(const Matrix& m, int slot) {
  Matrix r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = d_slot(m(i, j), slot);
  return r;
}

Matrix value_part(const Matrix& m) {
  Matrix r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).value_jet();
  return r;
}

std::vector<PMTerm> pm_moduli_derivative(const std::vector<PMTerm>& ts, const MarkedConfig& cfg, int slot) {
  std::vector<PMTerm> out;
  for (const auto& t : ts) {
    Jet dc = d_slot(t.c, slot);
    if (!dc.is_zero()) out.push_back(PMTerm{dc, t.e});
    for (size_t j = 0; j < t.e.size(); ++j) {
      Jet dz = d_slot(cfg.points[j], slot);
      if (t.e[j] == 0 || dz.is_zero()) continue;
      PMTerm u{t.c * Jet(-t.e[j]) * dz, t.e};
      u.e[j] -= 1;
      out.push_back(std::move(u));
    }
  }
  return out;
}

Expansion basis_moduli_derivative(const Geometry& geo, int lambda, KNIndex idx, int slot) {
  std::vector<PMTerm> t{PMTerm{geo.basis_constant(lambda, idx.n, idx.p), geo.basis_exponents(lambda, idx.n, idx.p)}};
  auto d = pm_moduli_derivative(t, geo.cfg(), slot);
  if (d.empty()) return {};
  return clean(geo.expand(lambda, d));
}

Expansion moduli_derivative(const Geometry& geo, int lambda, const Expansion& f, int slot) {
  Expansion out;
  for (const auto& [k, a] : f) {
    axpy(out, a, basis_moduli_derivative(geo, lambda, k, slot));
    Jet da = d_slot(a, slot);
    if (!da.is_zero()) axpy(out, da, Expansion{{k, Jet(1)}});
  }
  return clean(out);
}

Expansion pullback(int point) { return Expansion{{KNIndex{-1, point}, Jet(1)}}; }

OneParticleOp frame_motion(const FermionModule& F, int slot) {
  auto cache = std::make_shared<std::map<KNIndex, Expansion>>();
  auto mu = std::make_shared<std::mutex>();
  const FermionModule* Fp = &F;
  auto column = [Fp, slot, cache, mu](long M) {
    auto [n, p, i] = Fp->index().split(M);
    KNIndex k{n, p};
    Expansion ex;
    {
      std::lock_guard<std::mutex> lk(*mu);
      auto it = cache->find(k);
      if (it != cache->end()) ex = it->second;
    }
    if (!cache->count(k)) {
      ex = basis_moduli_derivative(Fp->alg().geo(), 0, k, slot);
      std::lock_guard<std::mutex> lk(*mu);
      cache->emplace(k, ex);
    }
    Column c;
    for (const auto& [t, a] : ex) c.emplace(Fp->index().index(t.n, t.p, i), a);
    return c;
  };
  // d/dz_p raises the pole order at one point by one
  return OneParticleOp{column, -2};
}

namespace {

std::vector<Matrix> gl_basis(int rank) {
  std::vector<Matrix> b;
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) b.push_back(elementary(rank, i, j));
  return b;
}

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool values_zero(const std::vector<Jet>& v) {
  return std::all_of(v.begin(), v.end(), [](const Jet& j) { return j.value_jet().is_zero(); });
}

long min_degree(const WedgeVector& v) {
  long d = 0;
  bool first = true;
  for (const auto& [m, c] : v) {
    d = first ? m.degree() : std::min(d, m.degree());
    first = false;
  }
  return d;
}

Geometry base_geometry(const Geometry& geo) {
  MarkedConfig c = geo.cfg();
  for (auto& p : c.points) p = p.value_jet();
  return Geometry(c);
}

Expansion value_expansion(const Expansion& e) {
  Expansion out;
  for (const auto& [k, a] : e)
    if (!a.value_jet().is_zero()) out.emplace(k, a.value_jet());
  return out;
}

// Vanishing at infinity of a weight-lambda expansion, read at the base point.
bool vanishes_at_infinity(const Geometry& base, int lambda, const Expansion& e) {
  Expansion v = value_expansion(e);
  if (v.empty()) return true;
  return form_order_at_infinity(from_expansion(v, lambda, base)) >= 1;
}

}  // namespace

namespace {

// Calls f on every generator u(A) v that stays in the window.
template <class Fn>
RegularSpan scan_generators(const FermionModule& F, int charge, long d_min, Fn f) {
  RegularSpan rs;
  const long D = F.index().layer_size();
  int lo = static_cast<int>(floor_div(d_min, D)) - 2;
  rs.functions = F.alg().regular_functions(lo, 2);
  auto window = F.window(charge, d_min);
  for (const auto& A : rs.functions)
    for (const auto& u : gl_basis(F.rank())) {
      OneParticleOp op = F.one_particle(current_op(F.rank(), u, A));
      for (const auto& v : window) {
        WedgeVector g = F.apply(op, WedgeVector{{v, Jet(1)}});
        if (g.empty()) continue;
        if (min_degree(g) < d_min) {
          ++rs.dropped;
          continue;
        }
        ++rs.kept;
        f(std::move(g));
      }
    }
  return rs;
}

}  // namespace

RegularSpan regular_span(const FermionModule& F, int charge, long d_min) {
  std::vector<WedgeVector> gens;
  RegularSpan rs = scan_generators(F, charge, d_min, [&](WedgeVector g) { gens.push_back(std::move(g)); });
  rs.generators = std::move(gens);
  return rs;
}

void SparseEchelon::reduce(Row& v) const {
  std::vector<int> hits;
  for (const auto& [c, a] : v)
    if (rows_.count(c)) hits.push_back(c);
  for (int c : hits) {
    auto it = v.find(c);
    if (it == v.end()) continue;
    Jet f = it->second;
    for (const auto& [j, b] : rows_.at(c)) {
      auto jt = v.find(j);
      if (jt == v.end()) {
        v.emplace(j, -(f * b));
      } else {
        jt->second -= f * b;
        if (jt->second.is_zero()) v.erase(jt);
      }
    }
  }
}

bool SparseEchelon::add(Row v) {
  reduce(v);
  int piv = -1;
  for (const auto& [c, a] : v)
    if (a.is_unit() && (piv < 0 || (priority_.empty() ? c < piv : priority_[c] < priority_[piv]))) piv = c;
  if (piv < 0) return false;
  Jet inv = v.at(piv).inverse();
  for (auto& [c, a] : v) a *= inv;
  for (auto& [p, row] : rows_) {
    auto it = row.find(piv);
    if (it == row.end()) continue;
    Jet f = it->second;
    for (const auto& [j, b] : v) {
      auto jt = row.find(j);
      if (jt == row.end()) {
        row.emplace(j, -(f * b));
      } else {
        jt->second -= f * b;
        if (jt->second.is_zero()) row.erase(jt);
      }
    }
  }
  rows_.emplace(piv, std::move(v));
  return true;
}

CoinvariantSpace::CoinvariantSpace(const FermionModule& F, int charge, long d_min,
                                   std::optional<std::vector<WedgeMonomial>> section, long lookahead)
    : charge_(charge), d_min_(d_min) {
  if (lookahead < 0) lookahead = 2 * F.index().layer_size();
  depth_ = d_min - lookahead;
  window_ = F.window(charge, depth_);
  for (size_t i = 0; i < window_.size(); ++i) pos_.emplace(window_[i], static_cast<int>(i));
  const int n = static_cast<int>(window_.size());
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  // low degrees are eliminated first, so the section is greedy by degree descending
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    long da = window_[a].degree(), db = window_[b].degree();
    return da != db ? da < db : a > b;
  });
  if (section) {
    std::vector<int> sec;
    for (const auto& m : *section) {
      auto it = pos_.find(m);
      if (it == pos_.end() || m.degree() < d_min)
        throw KnError(ErrorKind::WindowTooSmall, "section monomial outside the block window");
      sec.push_back(it->second);
    }
    std::stable_partition(order.begin(), order.end(),
                          [&](int c) { return std::find(sec.begin(), sec.end(), c) == sec.end(); });
  }
  std::vector<int> priority(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) priority[static_cast<size_t>(order[static_cast<size_t>(i)])] = i;
  ech_ = SparseEchelon(priority);
  span_ = scan_generators(F, charge, depth_, [&](WedgeVector g) {
    SparseEchelon::Row r;
    for (const auto& [m, c] : g) r.emplace(pos_.at(m), c);
    ech_.add(std::move(r));
  });
  std::vector<int> free;
  for (int c = 0; c < n; ++c)
    if (!ech_.is_pivot(c)) free.push_back(c);
  std::sort(free.begin(), free.end(), [&](int a, int b) {
    long da = window_[a].degree(), db = window_[b].degree();
    return da != db ? da > db : a < b;
  });
  std::vector<int> tail;
  for (int c : free) {
    if (window_[c].degree() >= d_min) {
      quotient_.push_back(c);
      section_.push_back(window_[c]);
    } else {
      tail.push_back(c);
      tail_.push_back(window_[c]);
    }
  }
  if (section) {
    auto want = *section;
    auto got = section_;
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (want != got) throw KnError(ErrorKind::Inconsistent, "requested section is not complementary to the regular span");
    section_ = *section;
    quotient_.clear();
    for (const auto& m : section_) quotient_.push_back(pos_.at(m));
  }
  quotient_.insert(quotient_.end(), tail.begin(), tail.end());
}

bool CoinvariantSpace::in_window(const WedgeVector& v) const {
  return std::all_of(v.begin(), v.end(), [&](const auto& kv) { return pos_.count(kv.first) > 0; });
}

std::vector<Jet> CoinvariantSpace::project(const WedgeVector& v) const {
  SparseEchelon::Row r;
  for (const auto& [m, c] : v) {
    auto it = pos_.find(m);
    if (it == pos_.end()) throw KnError(ErrorKind::WindowTooSmall, "vector leaves the coinvariant window");
    r.emplace(it->second, c);
  }
  ech_.reduce(r);
  std::vector<Jet> out;
  for (int c : quotient_) {
    auto it = r.find(c);
    out.push_back(it == r.end() ? Jet() : it->second);
  }
  return out;
}

bool CoinvariantSpace::in_regular_span(const WedgeVector& v) const {
  auto p = project(v);
  return std::all_of(p.begin(), p.end(), [](const Jet& j) { return j.is_zero(); });
}

BlocksReport blocks_report(const FermionModule& F, int charge, long d_min) {
  BlocksReport r;
  for (long d = d_min; d >= d_min - 2; --d) r.dims.emplace_back(d, CoinvariantSpace(F, charge, d).dimension());
  r.dimension = r.dims.front().second;
  r.stabilized = std::all_of(r.dims.begin(), r.dims.end(), [&](const auto& p) { return p.second == r.dimension; });
  return r;
}

std::shared_ptr<const Sugawara> make_sugawara(const MarkedConfig& cfg, int rank, long level_depth) {
  auto F = std::make_shared<const FermionModule>(std::make_shared<const KNAlgebra>(make_geometry(cfg)), rank);
  ReductiveSplit sp = make_split(rank);
  detect_level(sp, *F, 0, level_depth);
  return std::make_shared<const Sugawara>(F, sp);
}

Connection::Connection(std::shared_ptr<const Sugawara> S, int charge, long d_min, Frame frame,
                       std::optional<std::vector<WedgeMonomial>> section)
    : S_(std::move(S)), frame_(frame), blocks_(S_->module(), charge, d_min, std::move(section)) {}

const CoinvariantSpace& Connection::work(long depth) const {
  if (depth >= blocks_.depth()) return blocks_;
  std::lock_guard<std::mutex> lk(mu_);
  auto it = work_.find(depth);
  if (it != work_.end()) return *it->second;
  auto w = std::make_unique<CoinvariantSpace>(module(), blocks_.charge(), blocks_.d_min(), blocks_.section(),
                                              blocks_.d_min() - depth);
  return *work_.emplace(depth, std::move(w)).first->second;
}

WedgeVector Connection::potential(const ModuliDirection& X, const Expansion& eX, const WedgeVector& v) const {
  WedgeVector out = S_->apply(eX, v);
  if (frame_ == Frame::Transported) add_to(out, Jet(1), module().apply(frame_motion(module(), X.slot), v));
  return out;
}

WedgeVector Connection::apply(const ModuliDirection& X, const Expansion& eX, const WedgeVector& v) const {
  WedgeVector out = d_slot(v, X.slot);
  add_to(out, Jet(1), potential(X, eX, v));
  return out;
}

long Connection::potential_depth(const ModuliDirection& X, const Expansion& eX) const {
  long d = blocks_.d_min();
  for (const auto& m : blocks_.section()) {
    WedgeVector w = potential(X, eX, WedgeVector{{m, Jet(1)}});
    if (!w.empty()) d = std::min(d, min_degree(w));
  }
  return d;
}

Matrix Connection::block_matrix(const ModuliDirection& X, const Expansion& eX, int* leak, std::optional<long> depth) const {
  const int d = blocks_.dimension();
  std::vector<WedgeVector> images;
  long lowest = blocks_.d_min();
  for (const auto& m : blocks_.section()) {
    images.push_back(potential(X, eX, WedgeVector{{m, Jet(1)}}));
    if (!images.back().empty()) lowest = std::min(lowest, min_degree(images.back()));
  }
  const CoinvariantSpace& W = work(depth ? std::min(*depth, lowest) : lowest);
  Matrix B(d, d);
  if (leak) *leak = 0;
  for (int j = 0; j < d; ++j) {
    auto col = W.project(images[static_cast<size_t>(j)]);
    for (int i = 0; i < d; ++i) B(i, j) = col[static_cast<size_t>(i)];
    if (leak)
      for (size_t k = static_cast<size_t>(d); k < col.size(); ++k)
        if (!col[k].value_jet().is_zero()) ++*leak;
  }
  return B;
}

Connection::WellDefined Connection::well_defined(const ModuliDirection& X, const Expansion& eX) const {
  WellDefined r;
  const FermionModule& F = module();
  std::vector<WedgeVector> defects;
  for (const auto& A : blocks_.span().functions)
    for (const auto& u : gl_basis(F.rank())) {
      OneParticleOp uA = F.one_particle(current_op(F.rank(), u, A));
      for (const auto& v : blocks_.window()) {
        if (v.degree() < blocks_.d_min()) continue;
        WedgeVector w{{v, Jet(1)}};
        WedgeVector uv = F.apply(uA, w);
        if (uv.empty() || min_degree(uv) < blocks_.d_min()) continue;
        WedgeVector c = apply(X, eX, uv);
        add_to(c, Jet(-1), F.apply(uA, apply(X, eX, w)));
        if (!c.empty() && min_degree(c) < blocks_.depth()) {
          ++r.skipped;
          continue;
        }
        defects.push_back(std::move(c));
      }
    }
  const CoinvariantSpace& deep = blocks_;
  for (const auto& c : defects) {
    ++r.checked;
    if (!values_zero(deep.project(c))) {
      ++r.failures;
      r.ok = false;
    }
  }
  return r;
}

Jet Connection::curvature(const ModuliDirection& X, const Expansion& eX, const ModuliDirection& Y,
                          const Expansion& eY) const {
  long depth = std::min(potential_depth(X, eX), potential_depth(Y, eY));
  Matrix BX = block_matrix(X, eX, nullptr, depth), BY = block_matrix(Y, eY, nullptr, depth);
  Matrix vx = value_part(BX), vy = value_part(BY);
  Matrix C = value_part(d_slot(BY, X.slot)) - value_part(d_slot(BX, Y.slot)) + vx * vy - vy * vx;
  auto s = C.scalar_value();
  if (!s) throw KnError(ErrorKind::NotScalar, "curvature is not scalar on blocks");
  return *s;
}

IdentityReport check_nabl(const KNAlgebra& alg, const ModuliDirection& X, const std::vector<Expansion>& regular) {
  IdentityReport r;
  Geometry base = base_geometry(alg.geo());
  Expansion eX = pullback(X.point);
  for (const auto& A : regular) {
    Expansion AX = moduli_derivative(alg.geo(), 0, A, X.slot);
    axpy(AX, Jet(1), alg.act(eX, 0, A));
    ++r.checked;
    if (!vanishes_at_infinity(base, 0, AX)) ++r.failures;
  }
  return r;
}

IdentityReport check_reg1(const KNAlgebra& alg, const ModuliDirection& X, const std::vector<Expansion>& regular) {
  IdentityReport r;
  Geometry base = base_geometry(alg.geo());
  Expansion eX = pullback(X.point);
  for (const auto& e : regular) {
    Expansion v = moduli_derivative(alg.geo(), -1, e, X.slot);
    axpy(v, Jet(1), alg.bracket(eX, e));
    ++r.checked;
    if (!vanishes_at_infinity(base, -1, v)) ++r.failures;
  }
  return r;
}

IdentityReport check_ue(const KNAlgebra& alg, const ModuliDirection& X, const ModuliDirection& Y) {
  IdentityReport r;
  Geometry base = base_geometry(alg.geo());
  Expansion eX = pullback(X.point), eY = pullback(Y.point);
  Expansion v = alg.bracket(eX, eY);
  axpy(v, Jet(1), moduli_derivative(alg.geo(), -1, eY, X.slot));
  axpy(v, Jet(-1), moduli_derivative(alg.geo(), -1, eX, Y.slot));
  ++r.checked;
  if (!vanishes_at_infinity(base, -1, v)) ++r.failures;
  return r;
}

namespace {

// [d_X, B] v for an operator B on constant monomials, in the connection's frame.
template <class Op>
WedgeVector frame_derivative(const Connection& C, const ModuliDirection& X, const Op& B, const WedgeVector& v) {
  WedgeVector out = d_slot(B(v), X.slot);
  if (C.frame() == Frame::Transported) {
    OneParticleOp D = frame_motion(C.module(), X.slot);
    add_to(out, Jet(1), C.module().apply(D, B(v)));
    add_to(out, Jet(-1), B(C.module().apply(D, v)));
  }
  return out;
}

}  // namespace

namespace {

// Classifies the defect d on the monomial m as zero, a common scalar or neither.
void record_defect(IdentityReport& r, const WedgeMonomial& m, const WedgeVector& d) {
  ++r.checked;
  Q diag = 0;
  bool diagonal = true, zero = true;
  for (const auto& [k, c] : d) {
    if (c.value_jet().is_zero()) continue;
    zero = false;
    if (k == m)
      diag = c.v();
    else
      diagonal = false;
  }
  if (!zero) ++r.nonzero;
  if (diagonal && (!r.scalar || *r.scalar == diag)) {
    r.scalar = diag;
    return;
  }
  ++r.nonscalar;
}

}  // namespace

IdentityReport check_normal(const Connection& C, const ModuliDirection& X, const Matrix& u, const Expansion& A) {
  IdentityReport r;
  const FermionModule& F = C.module();
  DiffOpElement uA = current_op(F.rank(), u, A);
  auto B = [&](const WedgeVector& v) { return F.apply(uA, v); };
  std::optional<OneParticleOp> rhs_op;
  DiffOpElement rhs_current;
  if (C.frame() == Frame::Basis) {
    OneParticleOp base = F.one_particle(uA);
    rhs_op = OneParticleOp{[base, slot = X.slot](long M) {
                             Column c;
                             for (const auto& [t, a] : base.column(M)) {
                               Jet d = d_slot(a, slot);
                               if (!d.is_zero()) c.emplace(t, d);
                             }
                             return c;
                           },
                           base.min_shift};
  } else {
    rhs_current = current_op(F.rank(), u, moduli_derivative(F.alg().geo(), 0, A, X.slot));
  }
  for (const auto& m : C.blocks().window()) {
    if (m.degree() < C.blocks().d_min()) continue;
    WedgeVector v{{m, Jet(1)}};
    WedgeVector d = frame_derivative(C, X, B, v);
    add_to(d, Jet(-1), rhs_op ? F.apply(*rhs_op, v) : F.apply(rhs_current, v));
    record_defect(r, m, d);
  }
  r.failures = r.nonzero;
  return r;
}

IdentityReport check_norm1(const Connection& C, const ModuliDirection& X, const Expansion& e) {
  IdentityReport r;
  const Sugawara& S = C.sugawara();
  Expansion de = moduli_derivative(C.module().alg().geo(), -1, e, X.slot);
  auto T = [&](const WedgeVector& v) { return S.apply(e, v); };
  for (const auto& m : C.blocks().window()) {
    if (m.degree() < C.blocks().d_min()) continue;
    WedgeVector v{{m, Jet(1)}};
    WedgeVector d = frame_derivative(C, X, T, v);
    add_to(d, Jet(-1), S.apply(de, v));
    record_defect(r, m, d);
  }
  r.failures = r.nonscalar;
  return r;
}

namespace {

// Rational function through the samples with numerator and denominator degree
// at most dmax, verified on the unused samples.
std::optional<RationalFunction> reconstruct(const std::vector<Q>& t, const std::vector<Q>& y, int dmax) {
  for (int d = 0; d <= dmax; ++d) {
    int unknowns = 2 * (d + 1);
    if (static_cast<int>(t.size()) < unknowns + 2) break;
    Matrix m(unknowns, unknowns);
    for (int i = 0; i < unknowns; ++i) {
      Q pw = 1;
      for (int j = 0; j <= d; ++j) {
        m(i, j) = Jet(pw);
        m(i, d + 1 + j) = Jet(-y[static_cast<size_t>(i)] * pw);
        pw *= t[static_cast<size_t>(i)];
      }
    }
    for (const auto& k : kernel(m)) {
      std::vector<Jet> num(k.begin(), k.begin() + d + 1), den(k.begin() + d + 1, k.end());
      Poly pn(num), pd(den);
      if (pd.is_zero()) continue;
      bool ok = true;
      for (size_t i = 0; i < t.size() && ok; ++i) {
        Jet dv = pd.eval(Jet(t[i]));
        ok = !dv.is_zero() && pn.eval(Jet(t[i])) == Jet(y[i]) * dv;
      }
      if (ok) return RationalFunction(pn, pd);
    }
  }
  return std::nullopt;
}

}  // namespace

KZSystem kz_emit(const MarkedConfig& base, int rank, int charge, long d_min, int p, Frame frame, bool with_poles) {
  KZSystem out;
  out.direction = p;
  ModuliDirection X{p, 1};
  auto matrix_at = [&](const MarkedConfig& cfg, std::optional<std::vector<WedgeMonomial>> section,
                       std::vector<WedgeMonomial>* used) {
    auto S = make_sugawara(with_directions(cfg, {X}), rank);
    Connection C(S, charge, d_min, frame, std::move(section));
    if (used) *used = C.blocks().section();
    return value_part(C.block_matrix(X, pullback(p)));
  };
  std::vector<WedgeMonomial> section;
  Matrix M = matrix_at(base, std::nullopt, &section);
  out.dimension = M.rows();
  for (int i = 0; i < M.rows(); ++i) {
    out.matrix.emplace_back();
    for (int j = 0; j < M.cols(); ++j) out.matrix.back().push_back(M(i, j).v());
  }
  if (!with_poles || base.N() < 2) return out;
  const int dmax = 6;
  const int samples = 2 * (dmax + 1) + 3;
  for (int r = 1; r <= base.N(); ++r) {
    if (r == p) continue;
    std::vector<Q> ts;
    std::vector<Matrix> ms;
    for (int k = 1; static_cast<int>(ts.size()) < samples; ++k) {
      Q t = base.points[static_cast<size_t>(r - 1)].v() + Q(k, 7);
      t.canonicalize();
      bool clash = false;
      for (const auto& q : base.points) clash = clash || q.v() == t;
      if (clash) continue;
      MarkedConfig c = base;
      c.points[static_cast<size_t>(r - 1)] = Jet(t);
      ts.push_back(t);
      ms.push_back(matrix_at(c, section, nullptr));
    }
    KZPole pole;
    pole.p = p;
    pole.r = r;
    pole.simple = true;
    Q zp = base.points[static_cast<size_t>(p - 1)].v();
    for (int i = 0; i < out.dimension; ++i) {
      pole.residue.emplace_back();
      for (int j = 0; j < out.dimension; ++j) {
        std::vector<Q> ys;
        for (const auto& m : ms) ys.push_back(m(i, j).v());
        auto f = reconstruct(ts, ys, dmax);
        if (!f) throw KnError(ErrorKind::NotStabilized, "rational reconstruction did not converge");
        Poly den = f->den(), num = f->num(), q, rem;
        Q res = 0;
        if (den.eval(Jet(zp)).is_zero()) {
          divmod(den, Poly::linear(Jet(zp)), q, rem);
          if (q.eval(Jet(zp)).is_zero()) pole.simple = false;
          else res = (-(num.eval(Jet(zp)) / q.eval(Jet(zp)))).v();
        }
        pole.residue.back().push_back(res);
      }
    }
    out.poles.push_back(std::move(pole));
  }
  return out;
}

}  // namespace kn
