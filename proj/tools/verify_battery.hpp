#pragma once

#include <string>
#include <vector>

namespace cli {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyConfig {
  bool deterministic = false;  // omega == 0 subset with tighter tolerances
  double dt = 1e-3;
  int n_modes = 64;
  std::uint64_t seed = 7;
};

/// Desk-scale run of every module invariant; tolerances are pinned to the
/// default step-size budget, so a deliberately coarse dt makes the residual
/// checks fail by name (negative control).
std::vector<CheckResult> run_verify_battery(const VerifyConfig& cfg);

}  // namespace cli
