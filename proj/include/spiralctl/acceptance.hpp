#pragma once

#include <optional>
#include <string>
#include <vector>

namespace spiralctl::acceptance {

struct CriterionResult {
  int id = 0;
  std::string group;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::string detail;
};

struct AcceptanceOptions {
  /// Criterion ids ("4") or groups ("floquet", "spiral", "blowup", "pmp",
  /// "pendulum"); empty runs everything.
  std::vector<std::string> only;
  /// Replaces A0 in the spiral residual check (sensitivity test).
  std::optional<double> a0_override;
  unsigned threads = 1;
};

/// Known criterion ids and their groups, in order.
std::vector<std::pair<int, std::string>> criteria();

std::vector<CriterionResult> run(const AcceptanceOptions& options = {});

/// "[PASS] 4 spiral residual (0.002 s / 1 s): ..."
std::string format(const CriterionResult& r);

}  // namespace spiralctl::acceptance
