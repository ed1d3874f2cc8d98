#pragma once

#include "kn/sampling.hpp"
#include "test_helpers.hpp"

namespace kt {

inline kn::GeometryPtr geo_of(std::initializer_list<const char*> pts) {
  std::vector<kn::Q> v;
  for (const char* s : pts) v.push_back(q(s));
  return kn::make_geometry(kn::MarkedConfig::from_rationals(v));
}

using kn::random_current;
using kn::random_diffop;
using kn::random_expansion;
using kn::random_geo;
using kn::random_matrix;

}  // namespace kt
