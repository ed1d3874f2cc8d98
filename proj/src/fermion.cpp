#include "kn/fermion.hpp"

#include <algorithm>
#include <climits>
#include <functional>

#include "kn/errors.hpp"

namespace kn {

namespace {

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool contains(const std::vector<long>& v, long x) { return std::binary_search(v.begin(), v.end(), x); }

long count_in(const std::vector<long>& v, long a, long b) {  // a < x < b
  if (b <= a + 1) return 0;
  return std::lower_bound(v.begin(), v.end(), b) - std::upper_bound(v.begin(), v.end(), a);
}

void insert_sorted(std::vector<long>& v, long x) { v.insert(std::lower_bound(v.begin(), v.end(), x), x); }
void erase_sorted(std::vector<long>& v, long x) { v.erase(std::lower_bound(v.begin(), v.end(), x)); }

}  // namespace

std::tuple<int, int, int> WedgeIndexMap::split(long M) const {
  long n = floor_div(M, layer_size());
  long r = M - n * layer_size();
  return {static_cast<int>(n), static_cast<int>(r / rank) + 1, static_cast<int>(r % rank)};
}

int WedgeIndexMap::layer(long M) const { return static_cast<int>(floor_div(M, layer_size())); }

long WedgeMonomial::degree() const {
  long d = 0;
  for (long p : particles) d += p;
  for (long h : holes) d -= h;
  return d;
}

void add_to(WedgeVector& y, const Jet& a, const WedgeVector& x) {
  if (a.is_zero()) return;
  for (const auto& [m, c] : x) {
    auto it = y.find(m);
    if (it == y.end()) {
      Jet t = a * c;
      if (!t.is_zero()) y.emplace(m, t);
    } else {
      it->second += a * c;
      if (it->second.is_zero()) y.erase(it);
    }
  }
}

int move_particle(WedgeMonomial& m, long base, long from, long to) {
  long lo = std::min(from, to), hi = std::max(from, to);
  // occupied positions strictly between lo and hi
  long vac = std::max(0L, hi - std::max(lo + 1, base));
  long between = vac - count_in(m.holes, lo, hi) + count_in(m.particles, lo, hi);
  if (from < base)
    erase_sorted(m.particles, from);
  else
    insert_sorted(m.holes, from);
  if (to >= base)
    erase_sorted(m.holes, to);
  else
    insert_sorted(m.particles, to);
  return between % 2 == 0 ? 1 : -1;
}

FermionModule::FermionModule(std::shared_ptr<const KNAlgebra> alg, int rank) : alg_(std::move(alg)) {
  if (rank < 1) throw KnError(ErrorKind::Usage, "gl rank must be positive");
  idx_.N = alg_->N();
  idx_.rank = rank;
}

WedgeMonomial FermionModule::vacuum(int charge) const { return WedgeMonomial{charge, {}, {}}; }

bool FermionModule::occupied(const WedgeMonomial& m, long M) const {
  long b = base(m.charge);
  return M >= b ? !contains(m.holes, M) : contains(m.particles, M);
}

Column FermionModule::gamma_action(const Matrix& x, KNIndex idx, long M) const {
  auto [n, p, i] = idx_.split(M);
  Column c;
  for (const auto& [k, a] : alg_->product(idx, KNIndex{n, p}))
    for (int j = 0; j < rank(); ++j) {
      if (x(j, i).is_zero()) continue;
      Jet v = a * x(j, i);
      long t = idx_.index(k.n, k.p, j);
      auto it = c.find(t);
      if (it == c.end())
        c.emplace(t, v);
      else
        it->second += v;
    }
  std::erase_if(c, [](const auto& kv) { return kv.second.is_zero(); });
  return c;
}

Column FermionModule::column(const DiffOpElement& op, long M) const {
  if (op.current.rank() != rank() && !op.current.is_zero())
    throw KnError(ErrorKind::DimensionMismatch, "operator rank differs from the module");
  auto [n, p, i] = idx_.split(M);
  Column c;
  auto add = [&](long t, const Jet& v) {
    auto it = c.find(t);
    if (it == c.end())
      c.emplace(t, v);
    else
      it->second += v;
  };
  for (const auto& [idx, x] : op.current.terms())
    for (const auto& [k, a] : alg_->product(idx, KNIndex{n, p}))
      for (int j = 0; j < rank(); ++j)
        if (!x(j, i).is_zero()) add(idx_.index(k.n, k.p, j), a * x(j, i));
  for (const auto& [idx, s] : op.vector)
    for (const auto& [k, a] : alg_->action(0, idx, KNIndex{n, p})) add(idx_.index(k.n, k.p, i), s * a);
  std::erase_if(c, [](const auto& kv) { return kv.second.is_zero(); });
  return c;
}

int FermionModule::min_degree(const DiffOpElement& op) const {
  int k = INT_MAX;
  for (const auto& [idx, x] : op.current.terms()) k = std::min(k, idx.n);
  for (const auto& [idx, s] : op.vector) k = std::min(k, idx.n);
  return k;
}

std::vector<long> FermionModule::active_positions(int kmin, const WedgeMonomial& m) const {
  std::vector<long> out;
  long b = base(m.charge);
  // Highest unoccupied position; images of layer n start at layer n + kmin.
  long top = m.holes.empty() ? b - 1 : m.holes.back();
  int last_layer = idx_.layer(top) - kmin + 1;  // one layer of slack
  long last = (static_cast<long>(last_layer) + 1) * idx_.layer_size() - 1;
  for (long p : m.particles) out.push_back(p);
  for (long M = b; M <= last; ++M)
    if (!contains(m.holes, M)) out.push_back(M);
  return out;
}

OneParticleOp FermionModule::one_particle(const DiffOpElement& op) const {
  return OneParticleOp{[this, op](long M) { return column(op, M); }, min_degree(op)};
}

Jet FermionModule::lambda1(const DiffOpElement& op, const WedgeMonomial& m) const {
  if (min_degree(op) == INT_MAX) return Jet();
  return lambda1(one_particle(op), m);
}

Jet FermionModule::lambda1(const OneParticleOp& op, const WedgeMonomial& m) const {
  auto diag = [&](long M) {
    Column c = op.column(M);
    auto it = c.find(M);
    return it == c.end() ? Jet() : it->second;
  };
  long b = base(m.charge);
  Jet s;
  // occupied with layer < 0
  for (long p : m.particles)
    if (idx_.layer(p) < 0) s += diag(p);
  for (long M = b; M < 0; ++M)
    if (!contains(m.holes, M)) s += diag(M);
  // unoccupied with layer >= 0
  for (long h : m.holes)
    if (idx_.layer(h) >= 0) s -= diag(h);
  for (long M = 0; M < b; ++M)
    if (!contains(m.particles, M)) s -= diag(M);
  return s;
}

WedgeVector FermionModule::apply(const DiffOpElement& op, const WedgeMonomial& m) const {
  if (min_degree(op) == INT_MAX) return {};
  return apply(one_particle(op), m);
}

WedgeVector FermionModule::apply(const OneParticleOp& op, const WedgeVector& v) const {
  WedgeVector out;
  for (const auto& [m, c] : v) add_to(out, c, apply(op, m));
  return out;
}

WedgeVector FermionModule::apply(const OneParticleOp& op, const WedgeMonomial& m) const {
  WedgeVector out;
  long b = base(m.charge);
  for (long M : active_positions(op.min_shift, m)) {
    for (const auto& [t, a] : op.column(M)) {
      if (t == M || occupied(m, t)) continue;
      WedgeMonomial r = m;
      int sign = move_particle(r, b, M, t);
      add_to(out, sign > 0 ? a : -a, WedgeVector{{r, Jet(1)}});
    }
  }
  Jet l = lambda1(op, m);
  if (!l.is_zero()) add_to(out, l, WedgeVector{{m, Jet(1)}});
  return out;
}

WedgeVector FermionModule::apply(const DiffOpElement& op, const WedgeVector& v, std::optional<Truncation> trunc) const {
  WedgeVector out;
  for (const auto& [m, c] : v) {
    if (trunc && m.degree() < trunc->d_min)
      throw KnError(ErrorKind::TruncationOverflow, "input below the truncation floor");
    add_to(out, c, apply(op, m));
  }
  if (trunc) std::erase_if(out, [&](const auto& kv) { return kv.first.degree() < trunc->d_min - trunc->exact_margin; });
  return out;
}

WedgeVector FermionModule::apply_current(const CurrentElement& x, const WedgeVector& v, std::optional<Truncation> trunc) const {
  return apply(DiffOpElement{x, {}}, v, trunc);
}

WedgeVector FermionModule::apply_vector_field(const Expansion& e, const WedgeVector& v, std::optional<Truncation> trunc) const {
  return apply(DiffOpElement{CurrentElement(rank()), e}, v, trunc);
}

Jet FermionModule::projective_defect(const DiffOpElement& X, const DiffOpElement& Y, int charge, long d_min) const {
  DiffOpElement XY = alg_->bracket_diffop(X, Y);
  std::optional<Jet> scalar;
  for (const auto& m : window(charge, d_min)) {
    WedgeVector v{{m, Jet(1)}};
    WedgeVector d = apply(XY, v);
    add_to(d, Jet(-1), apply(X, apply(Y, v)));
    add_to(d, Jet(1), apply(Y, apply(X, v)));
    Jet s;
    for (const auto& [k, c] : d) {
      if (k == m)
        s = c;
      else
        throw KnError(ErrorKind::NotScalar, "defect has an off-diagonal entry");
    }
    if (scalar && !(*scalar == s)) throw KnError(ErrorKind::NotScalar, "defect differs between monomials");
    scalar = s;
  }
  return scalar.value_or(Jet());
}

std::vector<WedgeMonomial> FermionModule::window(int charge, long d_min) const {
  // -degree = r + sum a + sum b with strictly decreasing a, b >= 0 of length r
  // (holes base + a, particles base - 1 - b).
  long b = base(charge);
  std::vector<WedgeMonomial> out;
  long W = -d_min;
  // strict sets of r distinct nonnegative integers with sum s
  std::function<void(int, long, long, std::vector<long>&, std::vector<std::vector<long>>&)> gen =
      [&](int r, long s, long maxv, std::vector<long>& cur, std::vector<std::vector<long>>& acc) {
        if (r == 0) {
          if (s == 0) acc.push_back(cur);
          return;
        }
        // need r distinct values < = maxv, min sum r(r-1)/2
        for (long v = std::min(maxv, s); v >= r - 1; --v) {
          if (v * r - static_cast<long>(r) * (r - 1) / 2 < s) break;
          cur.push_back(v);
          gen(r - 1, s - v, v - 1, cur, acc);
          cur.pop_back();
        }
      };
  for (long w = 0; w <= W; ++w) {
    for (int r = 0; static_cast<long>(r) * r <= w; ++r) {
      long rest = w - r;
      for (long sa = 0; sa <= rest; ++sa) {
        std::vector<std::vector<long>> A, B;
        std::vector<long> cur;
        gen(r, sa, sa, cur, A);
        if (A.empty()) continue;
        gen(r, rest - sa, rest - sa, cur, B);
        for (const auto& a : A)
          for (const auto& bb : B) {
            WedgeMonomial m{charge, {}, {}};
            for (long x : a) m.holes.push_back(b + x);
            for (long y : bb) m.particles.push_back(b - 1 - y);
            std::sort(m.holes.begin(), m.holes.end());
            std::sort(m.particles.begin(), m.particles.end());
            out.push_back(std::move(m));
          }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

OperatorWindow operator_window(const FermionModule& F, const DiffOpElement& op, int charge, long d_min) {
  OperatorWindow w;
  w.basis = F.window(charge, d_min);
  std::map<WedgeMonomial, int> pos;
  for (size_t i = 0; i < w.basis.size(); ++i) pos.emplace(w.basis[i], static_cast<int>(i));
  for (size_t c = 0; c < w.basis.size(); ++c) {
    WedgeVector img = F.apply(op, w.basis[c]);
    for (const auto& [m, v] : img) {
      auto it = pos.find(m);
      if (it != pos.end()) w.entries.emplace_back(it->second, static_cast<int>(c), v);
    }
  }
  std::sort(w.entries.begin(), w.entries.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  return w;
}

DiffOpElement current_op(int rank, const Matrix& x, const Expansion& a) {
  DiffOpElement d{CurrentElement(rank), {}};
  d.current.add(x, a);
  return d;
}

DiffOpElement current_op(int rank, const Matrix& x, KNIndex idx) { return current_op(rank, x, Expansion{{idx, Jet(1)}}); }

DiffOpElement vector_op(int rank, const Expansion& e) { return DiffOpElement{CurrentElement(rank), e}; }

}  // namespace kn
