#include "doctest.h"
#include "kn/errors.hpp"
#include "kn/sugawara.hpp"
#include "random_elements.hpp"

using namespace kn;
using namespace kt;

namespace {

struct Setup {
  std::shared_ptr<const FermionModule> F;
  std::unique_ptr<Sugawara> S;
};

Setup setup(GeometryPtr g, int rank, const Q& scale = 1, int extra = 0) {
  Setup s;
  s.F = std::make_shared<const FermionModule>(std::make_shared<const KNAlgebra>(std::move(g)), rank);
  ReductiveSplit sp = make_split(rank, scale);
  detect_level(sp, *s.F, 0, -3);
  s.S = std::make_unique<Sugawara>(s.F, sp, extra);
  return s;
}

Expansion unit_vec(int n, int p = 1) { return Expansion{{KNIndex{n, p}, Jet(1)}}; }

bool same_vectors(const WedgeVector& a, const WedgeVector& b) { return a == b; }

}  // namespace

TEST_CASE("sugawara coefficients match the residue oracle at points 0 and 3") {
  auto g = geo_of({"0", "3"});
  struct Row {
    int k, r, n, p, m, s;
    const char* v;
  };
  const Row rows[] = {{0, 1, 0, 1, 0, 1, "1"},   {0, 1, 0, 2, 0, 1, "0"},       {0, 2, 1, 1, -1, 2, "0"},
                      {1, 1, 0, 1, 1, 2, "0"},   {-1, 2, -1, 1, 1, 2, "-1/3"}, {2, 1, 1, 1, 1, 1, "1"},
                      {0, 1, 1, 1, 0, 2, "-1/3"}};
  for (const auto& r : rows) {
    CAPTURE(r.k);
    CAPTURE(r.n);
    CAPTURE(r.m);
    CHECK(sugawara_coeff(*g, {r.k, r.r}, {r.n, r.p}, {r.m, r.s}) == J(r.v));
  }
}

TEST_CASE("one point: coefficient is the Kronecker delta of n + m and k") {
  auto g = geo_of({"0"});
  for (int k = -3; k <= 3; ++k)
    for (int n = -4; n <= 4; ++n)
      for (int m = -4; m <= 4; ++m) CHECK(sugawara_coeff(*g, {k, 1}, {n, 1}, {m, 1}) == Jet(n + m == k ? 1 : 0));
}

TEST_CASE("coefficients are symmetric and vanish outside the realized window") {
  for (auto pts : {std::vector<const char*>{"0", "1"}, std::vector<const char*>{"0", "1", "-2"}}) {
    GeometryPtr g = pts.size() == 2 ? geo_of({"0", "1"}) : geo_of({"0", "1", "-2"});
    auto s = setup(g, 1);
    const int N = g->N();
    const int C = s.S->window_C();
    CHECK(C == 1);
    for (int k = -2; k <= 2; ++k)
      for (int n = -4; n <= 4; ++n)
        for (int m = -4; m <= 4; ++m)
          for (int r = 1; r <= N; ++r)
            for (int p = 1; p <= N; ++p)
              for (int q = 1; q <= N; ++q) {
                Jet v = sugawara_coeff(*g, {k, r}, {n, p}, {m, q});
                CHECK(v == sugawara_coeff(*g, {k, r}, {m, q}, {n, p}));
                if (n + m < k || n + m > k + C) CHECK(v.is_zero());
              }
  }
  auto one = setup(geo_of({"0"}), 1);
  CHECK(one.S->window_C() == 0);
}

TEST_CASE("reductive split has dual bases and the adjoint Casimir gives kappa") {
  for (int n = 1; n <= 3; ++n) {
    auto sp = make_split(n);
    REQUIRE(sp.summands.size() == (n == 1 ? 1u : 2u));
    for (const auto& s : sp.summands)
      for (size_t i = 0; i < s.basis.size(); ++i)
        for (size_t j = 0; j < s.dual.size(); ++j) CHECK(trace(s.basis[i] * s.dual[j]) == Jet(i == j ? 1 : 0));
    CHECK(sp.summands[0].kappa == 0);
    if (n >= 2) CHECK(sp.summands[1].kappa == n);
  }
  auto half = make_split(2, 2);
  CHECK(half.summands[1].kappa == 1);
  // mixed pairs between the summands are orthogonal
  auto sp = make_split(3);
  for (const auto& x : sp.summands[0].basis)
    for (const auto& y : sp.summands[1].basis) CHECK(trace(x * y).is_zero());
}

TEST_CASE("detected level is one and scales inversely with alpha") {
  auto F1 = std::make_shared<const FermionModule>(std::make_shared<const KNAlgebra>(geo_of({"0"})), 1);
  auto sp = make_split(1);
  detect_level(sp, *F1, 0, -3);
  CHECK(sp.summands[0].level == 1);

  auto F2 = std::make_shared<const FermionModule>(std::make_shared<const KNAlgebra>(geo_of({"0", "1"})), 1);
  auto sp2 = make_split(1);
  detect_level(sp2, *F2, 0, -3);
  CHECK(sp2.summands[0].level == 1);

  auto sp3 = make_split(1, 2);
  detect_level(sp3, *F1, 1, -3);
  CHECK(sp3.summands[0].level == Q(1, 2));

  auto G = std::make_shared<const FermionModule>(std::make_shared<const KNAlgebra>(geo_of({"0"})), 2);
  auto sp4 = make_split(2);
  detect_level(sp4, *G, 0, -3);
  CHECK(sp4.summands[0].level == 1);
  CHECK(sp4.summands[1].level == 1);
}

TEST_CASE("critical level is rejected") {
  auto F = std::make_shared<const FermionModule>(std::make_shared<const KNAlgebra>(geo_of({"0"})), 2);
  auto sp = make_split(2);
  CHECK_THROWS_AS(Sugawara(F, sp), KnError);  // undetected level 0 with kappa 0
  detect_level(sp, *F, 0, -3);
  sp.summands[1].level = -sp.summands[1].kappa;
  try {
    Sugawara S(F, sp);
    FAIL("expected CriticalLevel");
  } catch (const KnError& e) {
    CHECK(e.kind() == ErrorKind::CriticalLevel);
  }
}

TEST_CASE("vacuum is an eigenvector of the degree-zero mode and T is linear") {
  for (int rank : {1, 2}) {
    auto s = setup(geo_of({"0", "1"}), rank);
    for (int charge : {0, 1}) {
      WedgeVector vac{{s.F->vacuum(charge), Jet(1)}};
      for (int p = 1; p <= 2; ++p) {
        WedgeVector img = s.S->apply_mode({0, p}, vac);
        for (const auto& [m, c] : img) CHECK(m == s.F->vacuum(charge));
      }
    }
    CHECK(s.S->apply(Expansion{}, WedgeVector{{s.F->vacuum(0), Jet(1)}}).empty());
    std::mt19937_64 rng(11);
    for (int t = 0; t < 3; ++t) {
      Expansion e = random_expansion(rng, 2, 2), f = random_expansion(rng, 2, 2), ef = e;
      axpy(ef, Jet(1), f);
      for (const auto& m : s.F->window(0, -2)) {
        WedgeVector v{{m, Jet(1)}}, sum = s.S->apply(e, v);
        add_to(sum, Jet(1), s.S->apply(f, v));
        CHECK(same_vectors(sum, s.S->apply(ef, v)));
      }
    }
  }
}

TEST_CASE("modes are almost graded") {
  auto s = setup(geo_of({"0", "1"}), 1);
  const long D = s.F->index().layer_size();
  for (int k = -2; k <= 2; ++k)
    for (const auto& m : s.F->window(0, -4)) {
      WedgeVector img = s.S->apply_mode({k, 1}, WedgeVector{{m, Jet(1)}});
      for (const auto& [out, c] : img) {
        long shift = out.degree() - m.degree();
        CHECK(shift >= D * (k - 2));
        CHECK(shift <= D * (k + 2));
      }
    }
}

TEST_CASE("fundamental relation holds exactly on the window") {
  {
    auto s = setup(geo_of({"0"}), 2);
    auto rep = fundamental_check(*s.S, unit_vec(0), elementary(2, 0, 1), unit_vec(1), 0, -6);
    CHECK(rep.ok);
    CHECK(rep.checked > 0);
  }
  for (auto g : {geo_of({"0"}), geo_of({"0", "1"})}) {
    auto s = setup(g, 1);
    const int N = g->N();
    Matrix one = Matrix::identity(1);
    for (int k = -2; k <= 2; ++k)
      for (int a = -2; a <= 2; ++a)
        for (int r = 1; r <= N; ++r)
          for (int p = 1; p <= N; ++p) {
            CAPTURE(k);
            CAPTURE(a);
            auto rep = fundamental_check(*s.S, unit_vec(k, r), one, unit_vec(a, p), 0, -6);
            CHECK(rep.ok);
          }
  }
  std::mt19937_64 rng(5);
  auto s = setup(geo_of({"0", "1"}), 2);
  for (int t = 0; t < 3; ++t) {
    auto rep = fundamental_check(*s.S, random_expansion(rng, 2, 2, -1, 1), random_matrix(rng, 2),
                                 random_expansion(rng, 2, 2, -1, 1), 0, -4);
    CHECK(rep.ok);
  }
}

TEST_CASE("one point: Virasoro relations with central charge equal to the rank") {
  for (int rank : {1, 2}) {
    auto s = setup(geo_of({"0"}), rank);
    for (int k = 1; k <= 3; ++k) {
      // T([e_k, e_-k]) - [T e_k, T e_-k] = -rank (k^3 - k) / 12
      Jet d = s.S->defect(unit_vec(k), unit_vec(-k), 0, -4);
      Q want(-rank * (k * k * k - k), 12);
      want.canonicalize();
      CHECK(d == Jet(want));
    }
  }
}

TEST_CASE("sugawara defect is scalar and local for two points") {
  auto s = setup(geo_of({"0", "1"}), 1);
  BasisCocycle gamma = [&](KNIndex a, KNIndex b) { return s.S->defect(unit_vec(a.n, a.p), unit_vec(b.n, b.p), 0, -3); };
  auto rep = check_local(gamma, 2, -2, 2);
  REQUIRE(rep.upper);
  CHECK(*rep.upper <= 0);
  CHECK(rep.is_local);
}

TEST_CASE("summand operators commute and the result is independent of alpha scale and window widening") {
  auto g = geo_of({"0", "1"});
  auto s = setup(g, 2);
  std::vector<std::unique_ptr<Sugawara>> parts;
  for (const auto& sm : s.S->split().summands) {
    ReductiveSplit one = s.S->split();
    one.summands = {sm};
    parts.push_back(std::make_unique<Sugawara>(s.F, one));
  }
  REQUIRE(parts.size() == 2);
  auto scaled_s = setup(g, 2, 3);
  auto wide = setup(g, 2, 1, 2);
  std::mt19937_64 rng(17);
  for (int t = 0; t < 2; ++t) {
    Expansion e = random_expansion(rng, 2, 2, -1, 1), f = random_expansion(rng, 2, 2, -1, 1);
    for (const auto& m : s.F->window(0, -3)) {
      WedgeVector v{{m, Jet(1)}};
      WedgeVector c = parts[0]->apply(e, parts[1]->apply(f, v));
      add_to(c, Jet(-1), parts[1]->apply(f, parts[0]->apply(e, v)));
      CHECK(c.empty());
      WedgeVector base = s.S->apply(e, v);
      CHECK(same_vectors(base, scaled_s.S->apply(e, v)));
      CHECK(same_vectors(base, wide.S->apply(e, v)));
    }
  }
}
