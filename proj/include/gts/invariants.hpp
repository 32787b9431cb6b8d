#pragma once

#include <string>
#include <vector>

namespace gts {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Closed-form sampling probabilities, normalization and spline knot fit.
CheckResult check_sampling_math();
/// Region boundaries against a hand iteration of the schedule, and the final
/// easy + middle coverage of the training range, over `trials` epoch-0 draws.
CheckResult check_region_schedule(int trials = 200);
/// Histogram of `draws` sampler outputs per region against the target.
CheckResult check_sampler_fidelity(int draws = 100000);
/// Policy-loss gradient against central differences.
CheckResult check_policy_gradient(int instances = 20);
/// Bias-score arithmetic on a synthetic sweep.
CheckResult check_bias_arithmetic();

std::vector<CheckResult> run_invariant_checks();

}  // namespace gts
