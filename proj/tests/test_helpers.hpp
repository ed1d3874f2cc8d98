#pragma once

#include <random>
#include <string>
#include <vector>

#include "kn/jet.hpp"
#include "kn/poly.hpp"
#include "kn/rational_function.hpp"
#include "kn/sampling.hpp"

namespace kt {

inline kn::Q q(const std::string& s) { return kn::parse_rational(s); }
inline kn::Jet J(const std::string& s) { return kn::Jet(q(s)); }

inline kn::Poly poly(std::initializer_list<long> c) {
  std::vector<kn::Jet> v;
  for (long x : c) v.emplace_back(x);
  return kn::Poly(std::move(v));
}

// prod (z - r_i)^e_i as a rational function
inline kn::RationalFunction factored(const kn::Jet& k, const std::vector<std::pair<kn::Jet, int>>& f) {
  kn::Poly num(k), den(kn::Jet(1));
  for (const auto& [r, e] : f) {
    if (e > 0) num = num * kn::Poly::linear(r).pow(e);
    if (e < 0) den = den * kn::Poly::linear(r).pow(-e);
  }
  return kn::RationalFunction(num, den);
}

using kn::small_rational;

}  // namespace kt
