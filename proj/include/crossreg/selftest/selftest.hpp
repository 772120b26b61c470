#pragma once

#include <string>
#include <vector>

namespace crossreg::selftest {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the embedded invariant suite (Sinkhorn marginals, SVD recovery,
/// gradient checks, oracle equivalences). The environment variable
/// CROSSREG_SELFTEST_FAULT=<check-name> perturbs that check's input so the
/// harness itself can be validated.
std::vector<CheckResult> run_selftest();

}  // namespace crossreg::selftest
