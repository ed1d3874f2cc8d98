#include "kn/sugawara.hpp"

#include <algorithm>
#include <climits>
#include <random>

#include "kn/errors.hpp"

namespace kn {

namespace {

Jet trace_product(const Matrix& x, const Matrix& y) { return trace(x * y); }

long ceil_half(long a) { return a >= 0 ? (a + 1) / 2 : -((-a) / 2); }

// Duals of a basis for alpha = scale * tr(xy) by solving against the Gram matrix.
std::vector<Matrix> dual_basis(const std::vector<Matrix>& basis, const Q& scale) {
  const int d = static_cast<int>(basis.size());
  Matrix G(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) G(a, b) = trace_product(basis[a], basis[b]) * Jet(scale);
  std::vector<Matrix> dual;
  for (int j = 0; j < d; ++j) {
    std::vector<Jet> rhs(d);
    rhs[j] = Jet(1);
    auto sol = solve(G, rhs);
    if (!sol) throw KnError(ErrorKind::Inconsistent, "alpha is degenerate on a summand");
    Matrix u(basis[0].rows(), basis[0].cols());
    for (int b = 0; b < d; ++b) u += basis[b] * (*sol)[b];
    dual.push_back(u);
  }
  return dual;
}

}  // namespace

Q adjoint_kappa(const std::vector<Matrix>& basis, const std::vector<Matrix>& dual) {
  std::optional<Jet> eig;
  for (const auto& y : basis) {
    Matrix c(y.rows(), y.cols());
    for (size_t i = 0; i < basis.size(); ++i) c += commutator(basis[i], commutator(dual[i], y));
    // c must be a multiple of y
    std::optional<Jet> ratio;
    for (int r = 0; r < y.rows() && !ratio; ++r)
      for (int s = 0; s < y.cols() && !ratio; ++s)
        if (y(r, s).is_unit()) ratio = c(r, s) / y(r, s);
    if (!ratio || !(c == y * *ratio)) throw KnError(ErrorKind::NotScalar, "Casimir is not scalar on the adjoint");
    if (eig && !(*eig == *ratio)) throw KnError(ErrorKind::NotScalar, "Casimir eigenvalue differs between basis elements");
    eig = ratio;
  }
  Jet e = eig.value_or(Jet());
  if (!e.pure()) throw KnError(ErrorKind::NotScalar, "Casimir eigenvalue is not constant");
  return Q(e.v() / 2);
}

ReductiveSplit make_split(int rank, const Q& alpha_scale) {
  if (rank < 1) throw KnError(ErrorKind::Usage, "gl rank must be positive");
  if (sgn(alpha_scale) == 0) throw KnError(ErrorKind::Usage, "alpha scale must be nonzero");
  ReductiveSplit sp;
  sp.rank = rank;
  sp.alpha_scale = alpha_scale;
  Summand s;
  s.name = "s";
  s.basis = {Matrix::identity(rank)};
  s.dual = dual_basis(s.basis, alpha_scale);
  s.kappa = adjoint_kappa(s.basis, s.dual);
  sp.summands.push_back(s);
  if (rank >= 2) {
    Summand t;
    t.name = "sl";
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j)
        if (i != j) t.basis.push_back(elementary(rank, i, j));
    for (int i = 0; i + 1 < rank; ++i) t.basis.push_back(elementary(rank, i, i) - elementary(rank, i + 1, i + 1));
    t.dual = dual_basis(t.basis, alpha_scale);
    t.kappa = adjoint_kappa(t.basis, t.dual);
    sp.summands.push_back(t);
  }
  return sp;
}

void detect_level(ReductiveSplit& split, const FermionModule& F, int charge, long d_min, int checks, unsigned long seed) {
  if (split.rank != F.rank()) throw KnError(ErrorKind::DimensionMismatch, "split rank differs from the module");
  Cocycles coc(F.alg().geo_ptr());
  const int N = F.alg().N();
  const int r = F.rank();
  auto alpha = [&](const Matrix& x, const Matrix& y) { return trace_product(x, y) * Jet(split.alpha_scale); };
  auto defect = [&](const Matrix& x, KNIndex a, const Matrix& y, KNIndex b) {
    return F.projective_defect(current_op(r, x, a), current_op(r, y, b), charge, d_min);
  };
  // probe with a nonzero function cocycle value
  KNIndex pa{1, 1}, pb{-1, 1};
  for (int n = 1; n <= 3 && !coc.function(pa, pb).is_unit(); ++n)
    for (int p = 1; p <= N; ++p) {
      pa = {n, p};
      pb = {-n, p};
      if (coc.function(pa, pb).is_unit()) break;
    }
  if (!coc.function(pa, pb).is_unit()) throw KnError(ErrorKind::Inconsistent, "no probe with a nonzero cocycle");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(-2, 2), deg(-2, 2), pt(1, N);
  for (auto& s : split.summands) {
    const Matrix& x = s.basis[0];
    const Matrix& y = s.dual[0];
    Jet c = defect(x, pa, y, pb) / (alpha(x, y) * coc.function(pa, pb));
    if (!c.pure()) throw KnError(ErrorKind::Inconsistent, "level depends on the points");
    s.level = c.v();
    for (int t = 0; t < checks; ++t) {
      Matrix u(r, r), v(r, r);
      for (const auto& b : s.basis) {
        u += b * Jet(coef(rng));
        v += b * Jet(coef(rng));
      }
      KNIndex a{deg(rng), pt(rng)}, b{deg(rng), pt(rng)};
      Jet predicted = Jet(s.level) * alpha(u, v) * coc.function(a, b);
      if (!(defect(u, a, v, b) == predicted))
        throw KnError(ErrorKind::Inconsistent, "level probes disagree on summand " + s.name);
    }
  }
}

Jet sugawara_coeff(const Geometry& geo, KNIndex k, KNIndex n, KNIndex m) {
  auto e1 = geo.basis_exponents(1, -n.n, n.p);
  auto e2 = geo.basis_exponents(1, -m.n, m.p);
  auto e3 = geo.basis_exponents(-1, k.n, k.p);
  std::vector<int> E(e1.size());
  for (size_t j = 0; j < E.size(); ++j) E[j] = e1[j] + e2[j] + e3[j];
  Jet c = geo.basis_constant(1, -n.n, n.p) * geo.basis_constant(1, -m.n, m.p) * geo.basis_constant(-1, k.n, k.p);
  return c * geo.cycle(E);
}

Sugawara::Sugawara(std::shared_ptr<const FermionModule> F, ReductiveSplit split, int extra_window)
    : F_(std::move(F)), split_(std::move(split)), extra_(extra_window) {
  if (split_.rank != F_->rank()) throw KnError(ErrorKind::DimensionMismatch, "split rank differs from the module");
  for (const auto& s : split_.summands)
    if (sgn(s.level + s.kappa) == 0) throw KnError(ErrorKind::CriticalLevel, "c + kappa vanishes on summand " + s.name);
  // realized window of the coefficients
  const int N = F_->alg().N();
  for (int k = -2; k <= 2; ++k)
    for (int r = 1; r <= N; ++r)
      for (int n = -6; n <= 6; ++n)
        for (int p = 1; p <= N; ++p)
          for (int m = k - n - 3; m <= k - n + 6; ++m)
            for (int s = 1; s <= N; ++s) {
              if (coeff({k, r}, {n, p}, {m, s}).is_zero()) continue;
              if (n + m < k) throw KnError(ErrorKind::Inconsistent, "Sugawara coefficient below the window");
              C_ = std::max(C_, n + m - k);
            }
}

Jet Sugawara::coeff(KNIndex k, KNIndex n, KNIndex m) const {
  auto key = std::make_tuple(k.n, k.p, n.n, n.p, m.n, m.p);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Jet v = sugawara_coeff(F_->alg().geo(), k, n, m);
  std::lock_guard<std::mutex> lk(mu_);
  cache_.emplace(key, v);
  return v;
}

int Sugawara::kill_threshold(const WedgeMonomial& mono) const {
  const auto& idx = F_->index();
  long b = F_->base(mono.charge);
  long top = mono.holes.empty() ? b - 1 : mono.holes.back();
  long low = b;
  if (!mono.particles.empty())
    low = mono.particles.front();
  else
    for (long h : mono.holes) {
      if (h != low) break;
      ++low;
    }
  // u(m) with m >= 1 moves layer l to layers >= l + m; one layer of slack
  return std::max(0, idx.layer(top) - idx.layer(low)) + 1;
}

Expansion Sugawara::B(const Expansion& e, KNIndex m) const {
  int kmin = INT_MAX, kmax = INT_MIN;
  for (const auto& [k, a] : e) {
    kmin = std::min(kmin, k.n);
    kmax = std::max(kmax, k.n);
  }
  const int N = F_->alg().N();
  Expansion out;
  for (int n = kmin - m.n - extra_; n <= std::min(m.n, kmax + C_ + extra_ - m.n); ++n) {
    Jet w = Jet(n < m.n ? 2 : 1);
    for (int p = 1; p <= N; ++p) {
      Jet s;
      for (const auto& [k, a] : e) s += a * coeff(k, {n, p}, m);
      if (!s.is_zero()) out.emplace(KNIndex{n, p}, w * s);
    }
  }
  return out;
}

WedgeVector Sugawara::apply(const Expansion& e0, const WedgeVector& v) const {
  Expansion e = clean(e0);
  WedgeVector out;
  if (e.empty() || v.empty()) return out;
  int kmin = INT_MAX;
  for (const auto& [k, a] : e) kmin = std::min(kmin, k.n);
  int K = 0;
  for (const auto& [m, c] : v) K = std::max(K, kill_threshold(m));
  const int N = F_->alg().N();
  const int r = F_->rank();
  // sum_i sum_(m,s) u_i(B_(m,s)) u^i(m,s) with B collecting n <= m (weight 2 for n < m)
  for (long mm = ceil_half(kmin) - extra_; mm <= K; ++mm)
    for (int s = 1; s <= N; ++s) {
      KNIndex ms{static_cast<int>(mm), s};
      Expansion Bm = B(e, ms);
      if (Bm.empty()) continue;
      for (const auto& sm : split_.summands) {
        Jet coef = Jet(Q(-1) / (2 * (sm.level + sm.kappa)));
        for (size_t i = 0; i < sm.basis.size(); ++i) {
          WedgeVector w = F_->apply(current_op(r, sm.dual[i], ms), v);
          if (w.empty()) continue;
          add_to(out, coef, F_->apply(current_op(r, sm.basis[i], Bm), w));
        }
      }
    }
  return out;
}

WedgeVector Sugawara::apply_mode(KNIndex k, const WedgeVector& v) const { return apply(Expansion{{k, Jet(1)}}, v); }

OperatorWindow Sugawara::field_window(const Expansion& e, int charge, long d_min) const {
  OperatorWindow w;
  w.basis = F_->window(charge, d_min);
  std::map<WedgeMonomial, int> pos;
  for (size_t i = 0; i < w.basis.size(); ++i) pos.emplace(w.basis[i], static_cast<int>(i));
  for (size_t c = 0; c < w.basis.size(); ++c)
    for (const auto& [m, v] : apply(e, WedgeVector{{w.basis[c], Jet(1)}})) {
      auto it = pos.find(m);
      if (it != pos.end()) w.entries.emplace_back(it->second, static_cast<int>(c), v);
    }
  std::sort(w.entries.begin(), w.entries.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  return w;
}

OperatorWindow Sugawara::mode_window(KNIndex k, int charge, long d_min) const {
  return field_window(Expansion{{k, Jet(1)}}, charge, d_min);
}

Jet Sugawara::defect(const Expansion& e, const Expansion& f, int charge, long d_min) const {
  Expansion ef = F_->alg().bracket(e, f);
  std::optional<Jet> scalar;
  for (const auto& m : F_->window(charge, d_min)) {
    WedgeVector v{{m, Jet(1)}};
    WedgeVector d = apply(ef, v);
    add_to(d, Jet(-1), apply(e, apply(f, v)));
    add_to(d, Jet(1), apply(f, apply(e, v)));
    Jet s;
    for (const auto& [k, c] : d) {
      if (k == m)
        s = c;
      else
        throw KnError(ErrorKind::NotScalar, "Sugawara defect has an off-diagonal entry");
    }
    if (scalar && !(*scalar == s)) throw KnError(ErrorKind::NotScalar, "Sugawara defect differs between monomials");
    scalar = s;
  }
  return scalar.value_or(Jet());
}

FundamentalReport fundamental_check(const Sugawara& S, const Expansion& e, const Matrix& x, const Expansion& a, int charge,
                                    long d_min) {
  const FermionModule& F = S.module();
  DiffOpElement xa = current_op(F.rank(), x, a);
  DiffOpElement xea = current_op(F.rank(), x, F.alg().act(e, 0, a));
  FundamentalReport rep;
  for (const auto& m : F.window(charge, d_min)) {
    WedgeVector v{{m, Jet(1)}};
    WedgeVector d = S.apply(e, F.apply(xa, v));
    add_to(d, Jet(-1), F.apply(xa, S.apply(e, v)));
    add_to(d, Jet(-1), F.apply(xea, v));
    ++rep.checked;
    for (const auto& [row, c] : d) {
      Q mag = abs(c.v());
      if (rep.ok || mag > rep.max_abs) {
        if (rep.ok) {
          rep.column = m;
          rep.row = row;
          rep.value = c;
        }
        rep.ok = false;
        rep.max_abs = std::max(rep.max_abs, mag);
      }
    }
  }
  return rep;
}

}  // namespace kn
