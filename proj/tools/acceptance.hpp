#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fractail::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool metric_passed = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::string detail;  // measured quantities against their targets

  bool passed() const { return metric_passed && seconds <= budget_seconds; }
  /// "criterion N PASS|FAIL  title  detail  [x.xs / budget ys]"
  std::string line() const;
};

inline constexpr int kCriterionCount = 9;

/// Criteria covered by a suite name, or nullopt for an unknown suite.
std::optional<std::vector<int>> suite_criteria(std::string_view suite);

/// Names accepted by suite_criteria.
const std::vector<std::string>& suite_names();

CriterionResult run_criterion(int id);

}  // namespace fractail::acceptance
