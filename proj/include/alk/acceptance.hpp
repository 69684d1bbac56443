#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alk/lattice.hpp"

namespace alk {

struct AcceptanceOptions {
  std::uint64_t seed = 7;
  long long budget = kDefaultBudget;
  int precision_bits = 53;
  double tail_target = 1e-13;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  long checks = 0, failures = 0;
  std::string detail;  // first failure, or a short summary
  double seconds = 0;  // wall time; kept out of reports
};

constexpr int kCriteria = 11;
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
// Ordered by id.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

}  // namespace alk
