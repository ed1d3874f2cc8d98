#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kn/jet.hpp"

namespace kn {

struct AcceptanceOptions {
  unsigned long seed = 1;
  int jobs = 1;
  // Overrides: the configuration replaces the sampled or default configurations,
  // the rank replaces the gl(n) ranks and the depth the truncation depth.
  std::optional<std::vector<Q>> points;
  std::optional<int> rank;
  std::optional<long> depth;
  int charge = 0;
  std::vector<int> only;  // criterion ids; empty runs all
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

constexpr int kCriteria = 12;
std::string criterion_name(int id);

// Runs the criteria in order; on_done is called after each one.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_done = {});

}  // namespace kn
