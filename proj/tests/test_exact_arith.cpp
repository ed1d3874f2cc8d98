#include <random>

#include "doctest.h"
#include "kn/errors.hpp"
#include "kn/rational_function.hpp"
#include "test_helpers.hpp"

using namespace kn;
using kt::J;
using kt::poly;

TEST_CASE("rf_normalize examples") {
  RationalFunction f(poly({-2, 0, 2}), poly({-2, 2}));
  CHECK(f.num() == poly({1, 1}));
  CHECK(f.den() == poly({1}));

  RationalFunction g(poly({0, 1}), poly({1}));
  CHECK(g.num() == poly({0, 1}));
  CHECK(g.den() == poly({1}));

  Jet qv = J("3/7"), rv = J("-2/3");
  RationalFunction h(Poly::linear(qv) * Poly::linear(rv), Poly::linear(qv));
  CHECK(h.num() == Poly::linear(rv));
  CHECK(h.den() == poly({1}));

  CHECK_THROWS_AS(RationalFunction(poly({1}), Poly()), KnError);
}

TEST_CASE("laurent_expand examples") {
  RationalFunction inv_z(poly({1}), poly({0, 1}));
  auto a = laurent_expand(inv_z, Center::at(Jet(0)), 2);
  CHECK(a.leading_order == -1);
  REQUIRE(a.coefficients.size() == 2);
  CHECK(a.coefficients[0] == Jet(1));
  CHECK(a.coefficients[1] == Jet(0));

  RationalFunction geo(poly({1}), poly({-1, 1}));
  auto b = laurent_expand(geo, Center::at(Jet(0)), 3);
  CHECK(b.leading_order == 0);
  for (const auto& c : b.coefficients) CHECK(c == Jet(-1));

  auto c = laurent_expand(RationalFunction(poly({0, 1})), Center::infinity(), 1);
  CHECK(c.leading_order == -1);
  CHECK(c.coefficients[0] == Jet(1));
}

TEST_CASE("re-expanding deeper extends coefficients") {
  RationalFunction f(poly({3, 0, 1}), poly({2, -3, 1}) * poly({0, 0, 1}));
  auto s = laurent_expand(f, Center::at(Jet(0)), 4);
  auto t = laurent_expand(f, Center::at(Jet(0)), 9);
  CHECK(s.leading_order == t.leading_order);
  for (size_t i = 0; i < s.coefficients.size(); ++i) CHECK(s.coefficients[i] == t.coefficients[i]);
}

TEST_CASE("order_at examples") {
  RationalFunction f(poly({1, -2, 1}), poly({0, 1}));
  CHECK(order_at(f, Center::at(Jet(1))) == 2);
  CHECK(order_at(f, Center::at(Jet(0))) == -1);
  CHECK(order_at(RationalFunction(poly({0, 0, 0, 1})), Center::infinity()) == -3);
  CHECK_THROWS_AS(order_at(RationalFunction(), Center::infinity()), KnError);
}

TEST_CASE("residue_at examples") {
  CHECK(residue_at(RationalFunction(poly({1}), poly({0, 1})), Jet(0)) == Jet(1));
  CHECK(residue_at(RationalFunction(poly({1}), poly({0, 0, 1})), Jet(0)) == Jet(0));
  CHECK(residue_at(RationalFunction(poly({1}), poly({0, 1}) * poly({-1, 1})), Jet(0)) == Jet(-1));
  CHECK(residue_at(RationalFunction(), Jet(5)) == Jet(0));
}

namespace {

RationalFunction random_rf(std::mt19937_64& rng, const std::vector<Jet>& poles) {
  std::uniform_int_distribution<int> ex(-3, 2);
  std::vector<std::pair<Jet, int>> f;
  for (const auto& p : poles) f.emplace_back(p, ex(rng));
  return kt::factored(Jet(kt::small_rational(rng)) + Jet(10), f) + RationalFunction(Poly(Jet(kt::small_rational(rng))));
}

}  // namespace

TEST_CASE("residues are linear and vanish on derivatives") {
  std::mt19937_64 rng(7);
  std::vector<Jet> pts = {J("0"), J("1/2"), J("-3")};
  for (int k = 0; k < 20; ++k) {
    RationalFunction f = random_rf(rng, pts), g = random_rf(rng, pts);
    for (const auto& c : pts) {
      CHECK(residue_at(f + g, c) == residue_at(f, c) + residue_at(g, c));
      CHECK(residue_at(f.derivative(), c) == Jet(0));
    }
  }
}

TEST_CASE("order is additive under products") {
  std::mt19937_64 rng(11);
  std::vector<Jet> pts = {J("0"), J("2"), J("-1/3")};
  for (int k = 0; k < 20; ++k) {
    RationalFunction f = random_rf(rng, pts), g = random_rf(rng, pts);
    if (f.is_zero() || g.is_zero()) continue;
    for (const auto& c : pts) CHECK(order_at(f * g, Center::at(c)) == order_at(f, Center::at(c)) + order_at(g, Center::at(c)));
    CHECK(order_at(f * g, Center::infinity()) == order_at(f, Center::infinity()) + order_at(g, Center::infinity()));
  }
}

TEST_CASE("jet ring axioms and pure behaviour") {
  Jet a(kt::q("2/3"), kt::q("1"), kt::q("-1/2"), kt::q("5")), b(kt::q("-3"), kt::q("1/7"), kt::q("2"), kt::q("0"));
  Jet c(kt::q("1/5"), kt::q("0"), kt::q("4"), kt::q("-1"));
  CHECK((a * b) * c == a * (b * c));
  CHECK(a * (b + c) == a * b + a * c);
  CHECK(a * a.inverse() == Jet(1));
  CHECK(Jet::eps1() * Jet::eps1() == Jet(0));
  CHECK(Jet::eps1() * Jet::eps2() == Jet(0, 0, 0, 1));
  Jet p(kt::q("4/9"));
  CHECK(p.pure());
  CHECK((p * p).v() == kt::q("16/81"));
  CHECK((p * p).pure());
  CHECK(a.pow(-2) * a.pow(2) == Jet(1));
}

TEST_CASE("jet chain rule against symbolic oracle") {
  // K, a1, b1, e1, a2, b2, e2, z0, q0, f, df/dq  (tests/oracles/jet_chain_rule.py)
  struct Row {
    const char *K, *a1, *b1;
    int e1;
    const char *a2, *b2;
    int e2;
    const char *z0, *q0, *v, *d;
  };
  const Row rows[] = {
      {"3", "-3", "6/5", 0, "0", "-3", 2, "-5", "8/3", "12", "0"},
      {"-1/5", "1", "-7/4", 3, "-1/2", "5", 1, "-1", "1", "-11/640", "-131/640"},
      {"1/3", "-4/5", "-2", 2, "-8/5", "3", -1, "2/3", "6/5", "-73984/6975", "-219776/4805"},
      {"8/3", "1/3", "-3", -1, "3/2", "-7/2", 1, "-3/4", "-8/3", "648/113", "-8496/12769"},
      {"-2", "9/2", "1", -1, "-2", "-9/5", 1, "3/2", "9/5", "69/38", "-1585/2888"},
      {"-7/5", "0", "1/4", 2, "-2", "-4/3", 1, "3", "-1", "-5929/240", "-847/40"},
      {"1", "-8/3", "-8/5", -1, "1/5", "5/2", 0, "7", "1", "15/169", "-600/28561"},
      {"-3/5", "-1/2", "1", -2, "-7", "1", -2, "-2", "0", "-1/135", "-1/27"},
      {"-3/5", "1/5", "-2", 2, "-1", "7", 3, "6", "-4/5", "91014192/390625", "-6246072/15625"},
      {"2/3", "-8", "2", 1, "-6", "-9", 0, "1", "-5", "-82/3", "16/3"},
      {"2", "1/5", "2", -1, "-1/2", "5/2", 1, "1", "5/2", "1/3", "-32/45"},
      {"3", "-6", "-4", 1, "7/2", "-1", 3, "1/2", "-5/2", "-4342023/128", "3464541/64"},
      {"-2/5", "-2", "6/5", -2, "-6", "0", 0, "-8", "1", "-5/648", "-25/5832"},
      {"2/3", "1", "-2", 3, "-8/5", "1/2", 2, "-6/5", "1", "-1/18750", "17/18750"},
      {"1/2", "1/5", "9/5", -2, "4/5", "-5/2", 2, "4/3", "0", "13225/392", "-58995/1372"},
      {"-8", "2/3", "5/3", -2, "-1", "-2/3", 2, "7/5", "4", "-8281/242", "11375/2662"},
      {"7/2", "5", "1", 2, "-8/5", "3", 2, "-4/5", "-7/3", "978922616/50625", "-469325612/16875"},
      {"6/5", "4/5", "-9", -1, "1/3", "1/2", -1, "-6", "-3/4", "-4/75", "-152/16875"},
      {"-5/4", "-6", "-1/5", 3, "-4", "-1/2", -2, "1", "7", "-10077696/87025", "-86500224/5134475"},
      {"5/3", "6/5", "-4/5", 1, "-2/5", "2", 0, "1/5", "-3/5", "43/15", "-2"},
  };
  for (const auto& r : rows) {
    Jet qj = J(r.q0) + Jet::eps1();
    Jet r1 = J(r.a1) * qj + J(r.b1), r2 = J(r.a2) * qj + J(r.b2);
    RationalFunction f = kt::factored(J(r.K), {{r1, r.e1}, {r2, r.e2}});
    Jet v = f.eval(J(r.z0));
    CHECK(v.v() == kt::q(r.v));
    CHECK(v.d1() == kt::q(r.d));
  }
}

TEST_CASE("nilpotent displacement of a pole") {
  // 1/(z - eps) seen from 0 is z^-1 + eps z^-2
  RationalFunction f(poly({1}), Poly::linear(Jet::eps1()));
  CHECK(order_at(f, Center::at(Jet(0))) == -2);
  auto s = laurent_expand(f, Center::at(Jet(0)), 2);
  CHECK(s.coefficients[0] == Jet::eps1());
  CHECK(s.coefficients[1] == Jet(1));
  CHECK(residue_at(f, Jet::eps1()) == Jet(1));
  CHECK(residue_at(f, Jet(0)) == Jet(1));
}
