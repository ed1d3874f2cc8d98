#include "kn/acceptance.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "kn/blocks.hpp"
#include "kn/errors.hpp"
#include "kn/parallel.hpp"
#include "kn/sampling.hpp"

namespace kn {

namespace {

const char* const kNames[kCriteria] = {
    "duality",
    "classical reduction",
    "cocycle locality",
    "cocycle identity and L-invariance",
    "fermion module",
    "projective closure",
    "fundamental relation",
    "sugawara projective representation",
    "connection well-definedness",
    "flatness",
    "jet-derivative identities",
    "truncation stability",
};

Expansion unit_vec(int n, int p = 1) { return Expansion{{KNIndex{n, p}, Jet(1)}}; }

std::string str(const Jet& j) {
  std::ostringstream os;
  os << j;
  return os.str();
}

struct Ctx {
  const AcceptanceOptions& opt;

  Rng rng(int id) const { return Rng(opt.seed * 1000003UL + static_cast<unsigned long>(id)); }
  int jobs() const { return opt.jobs; }
  long depth(long dflt) const { return opt.depth ? *opt.depth : dflt; }
  std::vector<int> ranks(std::vector<int> dflt) const { return opt.rank ? std::vector<int>{*opt.rank} : dflt; }
  int rank(int dflt) const { return opt.rank ? *opt.rank : dflt; }
  bool fixed() const { return opt.points.has_value(); }
  MarkedConfig base(const std::vector<Q>& dflt) const {
    return MarkedConfig::from_rationals(opt.points ? *opt.points : dflt);
  }
  // Sampled configurations with N points each, or the fixed one.
  std::vector<GeometryPtr> configs(Rng& rng, const std::vector<int>& Ns, int per_N) const {
    std::vector<GeometryPtr> out;
    if (fixed()) {
      out.push_back(make_geometry(base({})));
      return out;
    }
    for (int N : Ns)
      for (int k = 0; k < per_N; ++k) out.push_back(random_geo(rng, N));
    return out;
  }
};

// Per-sample pass/fail counters filled in parallel.
struct Tally {
  std::vector<char> bad;
  explicit Tally(std::size_t n) : bad(n, 0) {}
  long failures() const {
    long f = 0;
    for (char b : bad) f += b;
    return f;
  }
};

CriterionResult duality(const Ctx& c) {
  Rng rng = c.rng(1);
  auto geos = c.configs(rng, {1, 2, 3}, 5);
  struct Task {
    std::size_t g;
    int lambda, n;
  };
  std::vector<Task> tasks;
  for (std::size_t g = 0; g < geos.size(); ++g)
    for (int lambda : {-1, 0, 1, 2})
      for (int n = -5; n <= 5; ++n) tasks.push_back({g, lambda, n});
  std::vector<long> bad(tasks.size(), 0), checked(tasks.size(), 0);
  parallel_for(c.jobs(), tasks.size(), [&](std::size_t t) {
    const auto& [g, lambda, n] = tasks[t];
    const Geometry& G = *geos[g];
    for (int p = 1; p <= G.N(); ++p) {
      KNForm f = basis_form(G, lambda, {n, p});
      for (int m = -5; m <= 5; ++m)
        for (int r = 1; r <= G.N(); ++r) {
          Jet want(m == -n && r == p ? 1 : 0);
          if (kn_pairing(f, basis_form(G, 1 - lambda, {m, r}), G) != want) ++bad[t];
          ++checked[t];
        }
    }
  });
  long nb = 0, nc = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    nb += bad[t];
    nc += checked[t];
  }
  std::ostringstream d;
  d << nc << " pairings, configurations: " << geos.size() << ", mismatches: " << nb;
  return {1, "", nb == 0, d.str()};
}

CriterionResult classical(const Ctx&) {
  auto g = make_geometry(MarkedConfig::from_rationals({Q(0)}));
  KNAlgebra alg(g);
  Cocycles cc(g);
  long bad_basis = 0, bad_bracket = 0, bad_vector = 0, bad_function = 0;
  for (int n = -8; n <= 8; ++n) {
    RationalFunction want = n >= 0 ? RationalFunction(Poly::monomial(Jet(1), n))
                                   : RationalFunction(Poly(Jet(1)), Poly::monomial(Jet(1), -n));
    if (basis_form(*g, 0, {n, 1}).coeff() != want) ++bad_basis;
    for (int m = -8; m <= 8; ++m) {
      Expansion br;
      if (m != n) br[KNIndex{n + m, 1}] = Jet(m - n);
      if (alg.bracket(KNIndex{n, 1}, KNIndex{m, 1}) != br) ++bad_bracket;
      Q v = n + m == 0 ? Q(n * n * n - n, 12) : Q(0);
      v.canonicalize();
      if (cc.vector(KNIndex{n, 1}, KNIndex{m, 1}) != Jet(v)) ++bad_vector;
      if (cc.function(KNIndex{n, 1}, KNIndex{m, 1}) != Jet(n + m == 0 ? m : 0)) ++bad_function;
    }
  }
  std::ostringstream d;
  d << "basis " << bad_basis << ", brackets " << bad_bracket << ", vector cocycle " << bad_vector
    << ", function cocycle " << bad_function << " mismatches for |n|,|m| <= 8";
  return {2, "", bad_basis + bad_bracket + bad_vector + bad_function == 0, d.str()};
}

CriterionResult locality(const Ctx& c) {
  Rng rng = c.rng(3);
  auto geos = c.configs(rng, {1, 2, 3}, 1);
  const char* names[] = {"function", "vector", "mixing", "current"};
  std::vector<std::string> lines(geos.size() * 4);
  std::vector<char> ok(lines.size(), 0);
  std::vector<Matrix> xs, ys;
  for (std::size_t g = 0; g < geos.size(); ++g) {
    xs.push_back(random_matrix(rng, 2));
    ys.push_back(random_matrix(rng, 2));
  }
  parallel_for(c.jobs(), lines.size(), [&](std::size_t t) {
    std::size_t g = t / 4;
    int kind = static_cast<int>(t % 4);
    Cocycles cc(geos[g]);
    BilinearFormGL alpha{Jet(1), Jet(1)};
    BasisCocycle gamma = [&](KNIndex a, KNIndex b) {
      switch (kind) {
        case 0:
          return cc.function(a, b);
        case 1:
          return cc.vector(a, b);
        case 2:
          return cc.mixing(a, b);
        default: {
          CurrentElement x(2), y(2);
          x.add(xs[g], a);
          y.add(ys[g], b);
          return cc.current(x, y, alpha);
        }
      }
    };
    auto rep = check_local(gamma, geos[g]->N(), -6, 6);
    ok[t] = rep.upper && *rep.upper == 0 && rep.is_local;
    std::ostringstream d;
    d << names[kind] << " N=" << geos[g]->N() << " upper=" << (rep.upper ? std::to_string(*rep.upper) : "none");
    lines[t] = d.str();
  });
  bool pass = true;
  std::ostringstream d;
  for (std::size_t t = 0; t < lines.size(); ++t) {
    pass = pass && ok[t];
    d << (t ? "; " : "") << lines[t];
  }
  return {3, "", pass, d.str()};
}

CriterionResult cocycle_identity(const Ctx& c) {
  Rng rng = c.rng(4);
  const CocycleCombination combos[] = {
      {{Jet(1), Jet(0)}, Jet(0), Jet(0)},
      {{Jet(0), Jet(1)}, Jet(0), Jet(0)},
      {{Jet(0), Jet(0)}, Jet(1), Jet(0)},
      {{Jet(0), Jet(0)}, Jet(0), Jet(1)},
  };
  const char* names[] = {"trace", "trace-trace", "mixing", "vector", "function L-inv", "current L-inv"};
  constexpr int kTriples = 100;
  struct Sample {
    GeometryPtr g;
    DiffOpElement x, y, z;
    Expansion e, a, b;
    Matrix mx, my;
  };
  std::vector<Sample> samples;
  MarkedConfig fixed = c.fixed() ? c.base({}) : MarkedConfig{};
  GeometryPtr fixed_geo = c.fixed() ? make_geometry(fixed) : nullptr;
  for (int kind = 0; kind < 6; ++kind)
    for (int t = 0; t < kTriples; ++t) {
      GeometryPtr g = fixed_geo ? fixed_geo : random_geo(rng, 1 + t % 3);
      int N = g->N();
      Sample s{g, {}, {}, {}, {}, {}, {}, {}, {}};
      if (kind < 4) {
        s.x = random_diffop(rng, N, 2);
        s.y = random_diffop(rng, N, 2);
        s.z = random_diffop(rng, N, 2);
      } else {
        s.e = random_expansion(rng, N, 2);
        s.a = random_expansion(rng, N, 2);
        s.b = random_expansion(rng, N, 2);
        s.mx = random_matrix(rng, 2);
        s.my = random_matrix(rng, 2);
      }
      samples.push_back(std::move(s));
    }
  Tally tally(samples.size());
  parallel_for(c.jobs(), samples.size(), [&](std::size_t i) {
    int kind = static_cast<int>(i / kTriples);
    const Sample& s = samples[i];
    KNAlgebra alg(s.g);
    Cocycles cc(s.g);
    if (kind < 4) {
      auto gam = [&](const DiffOpElement& a, const DiffOpElement& b) { return diffop_cocycle(cc, a, b, combos[kind]); };
      Jet cyc = gam(alg.bracket_diffop(s.x, s.y), s.z) + gam(alg.bracket_diffop(s.y, s.z), s.x) +
                gam(alg.bracket_diffop(s.z, s.x), s.y);
      tally.bad[i] = !cyc.is_zero() || !(gam(s.x, s.y) + gam(s.y, s.x)).is_zero();
    } else if (kind == 4) {
      Jet l = cc.function(alg.act(s.e, 0, s.a), s.b) + cc.function(s.a, alg.act(s.e, 0, s.b));
      tally.bad[i] = !l.is_zero();
    } else {
      BilinearFormGL alpha{Jet(1), Jet(1)};
      CurrentElement xea(2), yb(2), xa(2), yeb(2);
      xea.add(s.mx, alg.act(s.e, 0, s.a));
      yb.add(s.my, s.b);
      xa.add(s.mx, s.a);
      yeb.add(s.my, alg.act(s.e, 0, s.b));
      tally.bad[i] = !(cc.current(xea, yb, alpha) + cc.current(xa, yeb, alpha)).is_zero();
    }
  });
  std::ostringstream d;
  long total = 0;
  for (int kind = 0; kind < 6; ++kind) {
    long f = 0;
    for (int t = 0; t < kTriples; ++t) f += tally.bad[static_cast<std::size_t>(kind * kTriples + t)];
    total += f;
    d << (kind ? "; " : "") << names[kind] << " " << f << "/" << kTriples << " failures";
  }
  return {4, "", total == 0, d.str()};
}

std::vector<long> partition_counts(int n) {
  std::vector<long> p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = 1;
  for (int part = 1; part <= n; ++part)
    for (int k = part; k <= n; ++k) p[static_cast<std::size_t>(k)] += p[static_cast<std::size_t>(k - part)];
  return p;
}

CriterionResult fermion(const Ctx& c) {
  Rng rng = c.rng(5);
  // degree slices for gl(1), N = 1
  FermionModule F1(std::make_shared<const KNAlgebra>(make_geometry(MarkedConfig::from_rationals({Q(0)}))), 1);
  auto p = partition_counts(10);
  std::map<long, long> slices;
  for (const auto& m : F1.window(0, -10)) ++slices[m.degree()];
  int bad_slices = 0;
  for (int k = 0; k <= 10; ++k)
    if (slices[-k] != p[static_cast<std::size_t>(k)]) ++bad_slices;
  // random applications
  std::map<std::pair<int, int>, std::shared_ptr<FermionModule>> modules;
  struct App {
    std::shared_ptr<FermionModule> F;
    WedgeMonomial m;
    DiffOpElement op;
  };
  std::vector<App> apps;
  for (int t = 0; t < 200; ++t) {
    int N = c.fixed() ? c.base({}).N() : 1 + t % 3;
    int rank = c.opt.rank ? *c.opt.rank : 1 + (t / 3) % 2;
    auto& F = modules[{N, rank}];
    if (!F) {
      GeometryPtr g = c.fixed() ? make_geometry(c.base({})) : random_geo(rng, N);
      F = std::make_shared<FermionModule>(std::make_shared<const KNAlgebra>(g), rank);
    }
    int charge = t % 3 - 1;
    auto win = F->window(charge, -3);
    apps.push_back({F, win[rng() % win.size()], random_diffop(rng, N, rank)});
  }
  Tally charge_bad(apps.size()), degree_bad(apps.size());
  parallel_for(c.jobs(), apps.size(), [&](std::size_t i) {
    const App& a = apps[i];
    for (const auto& [r, coef] : a.F->apply(a.op, a.m)) {
      if (r.charge != a.m.charge || r.holes.size() != r.particles.size()) charge_bad.bad[i] = 1;
      if (r.degree() > 0) degree_bad.bad[i] = 1;
    }
  });
  std::ostringstream d;
  d << "partition slices 0..-10: " << bad_slices << " mismatches; 200 applications: " << charge_bad.failures()
    << " charge violations, " << degree_bad.failures() << " positive degrees";
  return {5, "", bad_slices == 0 && charge_bad.failures() == 0 && degree_bad.failures() == 0, d.str()};
}

CriterionResult projective(const Ctx& c) {
  Rng rng = c.rng(6);
  long depth = c.depth(-6);
  std::vector<std::string> parts;
  bool pass = true;
  std::vector<int> Ns = c.fixed() ? std::vector<int>{c.base({}).N()} : std::vector<int>{1, 2};
  for (int rank : c.ranks({1, 2}))
    for (int N : Ns) {
      GeometryPtr g = c.fixed() ? make_geometry(c.base({})) : random_geo(rng, N);
      auto F = std::make_shared<const FermionModule>(std::make_shared<const KNAlgebra>(g), rank);
      Cocycles cc(g);
      std::vector<std::pair<DiffOpElement, DiffOpElement>> pairs;
      for (int t = 0; t < 50; ++t) {
        auto x = random_diffop(rng, N, rank);
        pairs.emplace_back(x, random_diffop(rng, N, rank));
      }
      Tally scal(pairs.size());
      parallel_for(c.jobs(), pairs.size(), [&](std::size_t i) {
        try {
          (void)F->projective_defect(pairs[i].first, pairs[i].second, c.opt.charge, depth);
        } catch (const KnError& e) {
          if (e.kind() != ErrorKind::NotScalar) throw;
          scal.bad[i] = 1;
        }
      });
      auto defect = [&](const CurrentElement& x, const CurrentElement& y) {
        return F->projective_defect(DiffOpElement{x, {}}, DiffOpElement{y, {}}, c.opt.charge, depth);
      };
      // probes E12 (x) A_{1,1} against E21 (x) A_{-1,1} and the identity pair
      CurrentElement p1(rank), q1(rank), p2(rank), q2(rank);
      p1.add(rank >= 2 ? elementary(rank, 0, 1) : Matrix::identity(1), KNIndex{1, 1});
      q1.add(rank >= 2 ? elementary(rank, 1, 0) : Matrix::identity(1), KNIndex{-1, 1});
      p2.add(Matrix::identity(rank), KNIndex{1, 1});
      q2.add(Matrix::identity(rank), KNIndex{-1, 1});
      Jet g1 = cc.function(KNIndex{1, 1}, KNIndex{-1, 1});
      Jet r1 = defect(p1, q1) / g1, r2;
      if (rank >= 2) r2 = (defect(p2, q2) / g1 - Jet(rank) * r1) / Jet(rank * rank);
      BilinearFormGL alpha{r1, r2};
      std::vector<std::pair<CurrentElement, CurrentElement>> cur;
      for (int t = 0; t < 30; ++t) {
        auto x = random_current(rng, N, rank);
        cur.emplace_back(x, random_current(rng, N, rank));
      }
      Tally fit(cur.size());
      parallel_for(c.jobs(), cur.size(), [&](std::size_t i) {
        fit.bad[i] = defect(cur[i].first, cur[i].second) != cc.current(cur[i].first, cur[i].second, alpha);
      });
      pass = pass && scal.failures() == 0 && fit.failures() == 0;
      std::ostringstream d;
      d << "gl(" << rank << ") N=" << N << ": " << scal.failures() << "/50 non-scalar, r1=" << str(r1)
        << " r2=" << str(r2) << ", " << fit.failures() << "/30 fit failures";
      parts.push_back(d.str());
    }
  std::ostringstream d;
  for (std::size_t i = 0; i < parts.size(); ++i) d << (i ? "; " : "") << parts[i];
  return {6, "", pass, d.str()};
}

CriterionResult fundamental(const Ctx& c) {
  int rank = c.rank(2);
  long depth = c.depth(-6);
  auto S = make_sugawara(c.base({Q(0), Q(1)}), rank);
  int N = S->module().alg().N();
  struct Triple {
    KNIndex e;
    Matrix x;
    KNIndex a;
  };
  std::vector<Triple> triples;
  for (int k = -3; k <= 3; ++k)
    for (int r = 1; r <= N; ++r)
      for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j)
          for (int n = -3; n <= 3; ++n)
            for (int p = 1; p <= N; ++p) triples.push_back({{k, r}, elementary(rank, i, j), {n, p}});
  Tally tally(triples.size());
  std::vector<long> checked(triples.size(), 0);
  parallel_for(c.jobs(), triples.size(), [&](std::size_t i) {
    const Triple& t = triples[i];
    auto rep = fundamental_check(*S, unit_vec(t.e.n, t.e.p), t.x, unit_vec(t.a.n, t.a.p), c.opt.charge, depth);
    tally.bad[i] = !rep.ok;
    checked[i] = rep.checked;
  });
  long cols = 0;
  for (long k : checked) cols += k;
  std::ostringstream d;
  d << "gl(" << rank << ") N=" << N << " depth " << depth << ": " << triples.size() << " triples, " << cols
    << " window columns, " << tally.failures() << " nonzero defects";
  return {7, "", tally.failures() == 0, d.str()};
}

CriterionResult sugawara(const Ctx& c) {
  Rng rng = c.rng(8);
  int rank = c.rank(2);
  long depth = c.depth(-6);
  auto S = make_sugawara(c.base({Q(0), Q(1)}), rank);
  int N = S->module().alg().N();
  std::vector<std::pair<Expansion, Expansion>> pairs;
  for (int t = 0; t < 20; ++t) {
    auto e = random_expansion(rng, N, 2);
    pairs.emplace_back(e, random_expansion(rng, N, 2));
  }
  Tally scal(pairs.size());
  parallel_for(c.jobs(), pairs.size(), [&](std::size_t i) {
    try {
      (void)S->defect(pairs[i].first, pairs[i].second, c.opt.charge, depth);
    } catch (const KnError& e) {
      if (e.kind() != ErrorKind::NotScalar) throw;
      scal.bad[i] = 1;
    }
  });
  // induced cocycle on basis pairs of degrees in [-3, 3]
  auto idx = indices_in_window(N, -3, 3);
  std::vector<std::pair<KNIndex, KNIndex>> basis_pairs;
  // the defect is antisymmetric, so half of the pairs suffice
  for (auto a : idx)
    for (auto b : idx)
      if (a < b) basis_pairs.emplace_back(a, b);
  std::vector<Jet> values(basis_pairs.size());
  parallel_for(c.jobs(), basis_pairs.size(), [&](std::size_t i) {
    values[i] = S->defect(unit_vec(basis_pairs[i].first.n, basis_pairs[i].first.p),
                          unit_vec(basis_pairs[i].second.n, basis_pairs[i].second.p), c.opt.charge, depth);
  });
  std::map<std::pair<KNIndex, KNIndex>, Jet> table;
  for (std::size_t i = 0; i < basis_pairs.size(); ++i) table[basis_pairs[i]] = values[i];
  auto rep = check_local(
      [&](KNIndex a, KNIndex b) {
        if (a == b) return Jet();
        return a < b ? table.at({a, b}) : -table.at({b, a});
      },
      N, -3, 3);
  bool local = rep.upper && *rep.upper == 0 && rep.is_local;
  std::ostringstream d;
  d << "gl(" << rank << ") N=" << N << " depth " << depth << ": " << scal.failures()
    << "/20 non-scalar; induced cocycle upper=" << (rep.upper ? std::to_string(*rep.upper) : "none")
    << " over [-3,3]";
  return {8, "", scal.failures() == 0 && local, d.str()};
}

// Transported-frame connections on the base with eps1 at point 1 and eps2 at point N.
struct ConnectionCache {
  std::mutex mu;
  std::map<std::pair<int, long>, std::shared_ptr<Connection>> conns;
  std::map<int, std::shared_ptr<const Sugawara>> sug;
};

std::pair<ModuliDirection, ModuliDirection> directions(const MarkedConfig& base) {
  return {ModuliDirection{1, 1}, ModuliDirection{base.N(), 2}};
}

std::shared_ptr<const Sugawara> sugawara_for(ConnectionCache& cs, const MarkedConfig& base, int rank) {
  std::lock_guard<std::mutex> lk(cs.mu);
  auto& s = cs.sug[rank];
  if (!s) {
    auto [X, Y] = directions(base);
    s = make_sugawara(with_directions(base, {X, Y}), rank);
  }
  return s;
}

std::shared_ptr<Connection> connection_for(ConnectionCache& cs, const MarkedConfig& base, int rank, int charge,
                                           long depth) {
  auto S = sugawara_for(cs, base, rank);
  std::lock_guard<std::mutex> lk(cs.mu);
  auto& c = cs.conns[{rank, depth}];
  if (!c) c = std::make_shared<Connection>(S, charge, depth, Frame::Transported);
  return c;
}

CriterionResult well_defined(const Ctx& c, ConnectionCache& cs) {
  Rng rng = c.rng(9);
  long depth = c.depth(-6);
  MarkedConfig base = c.base({Q(0), Q(1)});
  auto [X, Y] = directions(base);
  std::vector<std::string> parts;
  bool pass = true;
  for (int rank : c.ranks({1, 2})) {
    auto C = connection_for(cs, base, rank, c.opt.charge, depth);
    for (const auto& [dir, e0] : {std::pair{X, pullback(1)}, std::pair{Y, pullback(base.N())}}) {
      auto wd = C->well_defined(dir, e0);
      Matrix B = value_part(C->block_matrix(dir, e0));
      auto fields = C->module().alg().regular_forms(-1, -3, 2);
      std::vector<Expansion> corrected;
      for (int t = 0; t < 5; ++t) {
        Expansion e = e0;
        axpy(e, Jet(1), random_combination(rng, fields));
        corrected.push_back(clean(e));
      }
      Tally moved(corrected.size());
      parallel_for(c.jobs(), corrected.size(),
                   [&](std::size_t i) { moved.bad[i] = !(value_part(C->block_matrix(dir, corrected[i])) == B); });
      bool ok = wd.ok && wd.checked > 0 && moved.failures() == 0;
      pass = pass && ok;
      std::ostringstream d;
      d << "gl(" << rank << ") d/dz_" << dir.point << " (slot " << dir.slot << "): " << wd.checked << " commutators, " << wd.failures
        << " outside the span, " << wd.skipped << " skipped; " << moved.failures() << "/5 pull-backs change the block matrix";
      parts.push_back(d.str());
    }
  }
  std::ostringstream d;
  d << "depth " << depth << ", dimension " << connection_for(cs, base, c.ranks({1, 2}).front(), c.opt.charge, depth)->blocks().dimension();
  for (const auto& p : parts) d << "; " << p;
  return {9, "", pass, d.str()};
}

CriterionResult flatness(const Ctx& c, ConnectionCache& cs) {
  long depth = c.depth(-6);
  MarkedConfig base = c.base({Q(0), Q(1)});
  auto [X, Y] = directions(base);
  bool pass = true;
  std::ostringstream d;
  bool first = true;
  for (int rank : c.ranks({1, 2})) {
    auto C = connection_for(cs, base, rank, c.opt.charge, depth);
    std::optional<Jet> l, m;
    std::string err;
    try {
      l = C->curvature(X, pullback(1), Y, pullback(base.N()));
      m = C->curvature(Y, pullback(base.N()), X, pullback(1));
    } catch (const KnError& e) {
      if (e.kind() != ErrorKind::NotScalar) throw;
      err = e.what();
    }
    bool ok = l && m && *l == -*m;
    pass = pass && ok;
    d << (first ? "" : "; ") << "gl(" << rank << ") depth " << depth << ": ";
    if (l && m)
      d << "lambda(1," << base.N() << ")=" << str(l->value_jet()) << " lambda(" << base.N() << ",1)=" << str(m->value_jet());
    else
      d << "not scalar";
    first = false;
  }
  return {10, "", pass, d.str()};
}

CriterionResult identities(const Ctx& c) {
  Rng rng = c.rng(11);
  constexpr int kSamples = 20;
  // regular functions and fields on jet configurations with N in {1, 2}
  long nabl_bad = 0, reg1_bad = 0, ue_bad = 0;
  for (int t = 0; t < kSamples; ++t) {
    MarkedConfig base = c.fixed() ? c.base({}) : MarkedConfig::from_rationals(random_points(rng, 1 + t % 2));
    auto [X, Y] = directions(base);
    KNAlgebra alg(make_geometry(with_directions(base, {X, Y})));
    Expansion A = random_combination(rng, alg.regular_functions(-4, 2));
    Expansion e = random_combination(rng, alg.regular_forms(-1, -4, 2));
    nabl_bad += !check_nabl(alg, X, {A}).ok();
    reg1_bad += !check_reg1(alg, X, {e}).ok();
    ue_bad += !check_ue(alg, X, Y).ok();
  }
  // operator identities in the transported frame
  MarkedConfig base = c.base({Q(0), Q(3, 2)});
  auto [X, Y] = directions(base);
  int N = base.N();
  struct Op {
    int rank;
    Matrix u;
    Expansion a;
  };
  std::vector<Op> normal_samples, norm1_samples;
  std::map<int, std::shared_ptr<Connection>> conns;
  for (int rank : c.ranks({1, 2})) {
    auto S = make_sugawara(with_directions(base, {X}), rank);
    conns[rank] = std::make_shared<Connection>(S, c.opt.charge, c.depth(rank == 1 ? -3 : -2), Frame::Transported);
  }
  auto ranks = c.ranks({1, 2});
  for (int t = 0; t < kSamples; ++t) {
    int rank = ranks[static_cast<std::size_t>(t) % ranks.size()];
    normal_samples.push_back({rank, random_matrix(rng, rank), random_expansion(rng, N, 2)});
    norm1_samples.push_back({rank, Matrix(), random_expansion(rng, N, 2)});
  }
  Tally normal_bad(kSamples), norm1_bad(kSamples);
  parallel_for(c.jobs(), 2 * kSamples, [&](std::size_t i) {
    if (i < kSamples) {
      const Op& s = normal_samples[i];
      normal_bad.bad[i] = !check_normal(*conns[s.rank], X, s.u, s.a).ok();
    } else {
      const Op& s = norm1_samples[i - kSamples];
      norm1_bad.bad[i - kSamples] = !check_norm1(*conns[s.rank], X, s.a).ok();
    }
  });
  std::ostringstream d;
  d << "normal " << normal_bad.failures() << ", nabl " << nabl_bad << ", reg1 " << reg1_bad << ", norm1 "
    << norm1_bad.failures() << ", ue " << ue_bad << " failures out of " << kSamples << " each";
  bool pass = normal_bad.failures() + nabl_bad + reg1_bad + norm1_bad.failures() + ue_bad == 0;
  return {11, "", pass, d.str()};
}

CriterionResult truncation(const Ctx& c, ConnectionCache& cs) {
  long start = c.depth(-6);
  MarkedConfig base = c.base({Q(0), Q(1)});
  auto [X, Y] = directions(base);
  bool pass = true;
  std::ostringstream d;
  bool first = true;
  for (int rank : c.ranks({1, 2})) {
    auto S = sugawara_for(cs, base, rank);
    long dstar = start;
    BlocksReport rep = blocks_report(S->module(), c.opt.charge, dstar);
    for (int k = 0; k < 4 && !rep.stabilized; ++k) rep = blocks_report(S->module(), c.opt.charge, --dstar);
    d << (first ? "" : "; ") << "gl(" << rank << "): ";
    first = false;
    if (!rep.stabilized) {
      pass = false;
      d << "no stabilization down to " << dstar;
      continue;
    }
    auto a = connection_for(cs, base, rank, c.opt.charge, dstar);
    auto b = connection_for(cs, base, rank, c.opt.charge, dstar - 2);
    bool same_section = a->blocks().section() == b->blocks().section();
    bool same = same_section;
    if (same_section)
      for (const auto& [dir, e] : {std::pair{X, pullback(1)}, std::pair{Y, pullback(base.N())}})
        same = same && value_part(a->block_matrix(dir, e)) == value_part(b->block_matrix(dir, e));
    pass = pass && same;
    d << "dims";
    for (const auto& [dm, dim] : rep.dims) d << " " << dm << ":" << dim;
    d << ", block matrices at " << dstar << " and " << dstar - 2 << (same ? " agree" : " differ");
  }
  return {12, "", pass, d.str()};
}

}  // namespace

std::string criterion_name(int id) { return id >= 1 && id <= kCriteria ? kNames[id - 1] : "unknown"; }

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_done) {
  Ctx c{opt};
  ConnectionCache cs;
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriteria; ++id) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    CriterionResult r;
    try {
      switch (id) {
        case 1: r = duality(c); break;
        case 2: r = classical(c); break;
        case 3: r = locality(c); break;
        case 4: r = cocycle_identity(c); break;
        case 5: r = fermion(c); break;
        case 6: r = projective(c); break;
        case 7: r = fundamental(c); break;
        case 8: r = sugawara(c); break;
        case 9: r = well_defined(c, cs); break;
        case 10: r = flatness(c, cs); break;
        case 11: r = identities(c); break;
        default: r = truncation(c, cs); break;
      }
    } catch (const std::exception& e) {
      r = {id, "", false, std::string("error: ") + e.what()};
    }
    r.id = id;
    r.name = criterion_name(id);
    out.push_back(r);
    if (on_done) on_done(r);
  }
  return out;
}

}  // namespace kn
