#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

namespace perc {

/// Bernoulli mean with its normal-approximation standard error.
struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
};

Estimate make_estimate(std::uint64_t successes, std::uint64_t trials);

/// Runs `trial(t)` for t in [0, trials) on `workers` threads and counts successes.
/// Trial t is always handed index t, so the result does not depend on scheduling.
Estimate estimate_bernoulli(std::uint64_t trials, unsigned workers,
                            const std::function<bool(std::uint64_t)>& trial);

/// Worker count used when callers pass 0.
unsigned default_workers();

}  // namespace perc
