#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mimo::verify {

struct IdentityResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest observed error, in the identity's own metric
  double tolerance = 0.0;
  int cases = 0;
};

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  // Evaluates the receive-side MMSE form with -N0, for mutation smoke tests.
  bool corrupt_mmse_sign = false;
};

// Every closed-form derivation and detector kernel against its brute-force
// oracle, plus the structural properties of the approximated detectors.
std::vector<IdentityResult> run_identity_suite(const VerifyOptions& opts = {});

bool all_passed(const std::vector<IdentityResult>& results);

}  // namespace mimo::verify
