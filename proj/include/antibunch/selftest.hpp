#pragma once

#include <optional>
#include <string>
#include <vector>

namespace antibunch {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

/// Fast invariant suite. A dim override replaces the truncation of every check
/// that builds a displaced state, so an undersized value surfaces as a failure.
std::vector<CheckResult> run_selftest(std::optional<int> dim = std::nullopt);

}  // namespace antibunch
