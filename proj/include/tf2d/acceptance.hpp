#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace tf2d {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;      ///< one-line summary of the measured values
  nlohmann::json values;   ///< measured values, machine-readable
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  std::vector<int> criteria;  ///< empty: all of 1..11
  /// Binary whose `verify-all` is run twice for the determinism criterion.
  /// Criterion 11 fails with a diagnostic if unset.
  std::string executable;
  /// Called after each criterion (e.g. to print progress lines).
  std::function<void(const CriterionResult&)> on_result;
};

inline constexpr int kCriterionCount = 11;

/// Runs one criterion. Results do not depend on timing or worker count.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts);

/// Runs the selected criteria in ascending order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// "criterion <id> <name>: PASS|FAIL  <detail>".
std::string format_result(const CriterionResult& r);

/// {"seed", "passed", "criteria": [{"id", "name", "passed", "detail", "values"}]}.
nlohmann::json acceptance_report(std::uint64_t seed,
                                 const std::vector<CriterionResult>& results);

/// Parses "1,3,5-7" into ids in 1..kCriterionCount; ParameterError otherwise.
std::vector<int> parse_criteria(const std::string& spec);

}  // namespace tf2d
