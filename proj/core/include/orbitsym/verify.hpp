#pragma once

#include <string>
#include <vector>

namespace orbitsym {

/// Named end-to-end verification checks.  Every check builds its own inputs,
/// runs against documented tolerances, and reports a single pass/fail with a
/// headline value.  The CLI `verify` subcommand and the acceptance test
/// binary both run these.
struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;   // headline metric (worst error, best margin, ...)
  std::string detail;
};

std::vector<std::string> verification_check_names();

CheckResult run_verification_check(const std::string& name, unsigned seed, int threads);

std::vector<CheckResult> run_all_verification_checks(unsigned seed, int threads);

}  // namespace orbitsym
