#pragma once

#include <cmath>
#include <limits>

#include "lindex/error.hpp"

namespace lindex::integrators {

struct TruncationBound {
  double absolute_factor = 0.0;  // multiply by ||rho(0)|| for the absolute bound
  double relative = 0.0;
};

/// Upper bound on the error of an order-n truncated Taylor step,
///   e^{D} D^{n+1} / (n+1)!   with D = ||L|| t,
/// evaluated in log-space.
inline TruncationBound truncation_error_bound(double norm_l, double t, unsigned n) {
  if (norm_l < 0 || t < 0)
    throw ContractViolation("truncation_error_bound: norm and time must be non-negative");
  const double delta = norm_l * t;
  if (delta == 0.0) return {};
  const double log_bound =
      delta + static_cast<double>(n + 1) * std::log(delta) - std::lgamma(static_cast<double>(n) + 2.0);
  const double bound = std::exp(log_bound);
  return {bound, bound};
}

struct OrderChoice {
  unsigned order = 0;
  bool reached = true;  // false when n_max still misses the target
};

/// Smallest n <= n_max whose relative bound is <= error_target, scanning from n = 0.
inline OrderChoice choose_order(double norm_l, double dt, double error_target, unsigned n_max) {
  if (!(error_target > 0)) throw ContractViolation("choose_order: error_target must be positive");
  for (unsigned n = 0; n <= n_max; ++n)
    if (truncation_error_bound(norm_l, dt, n).relative <= error_target) return {n, true};
  return {n_max, false};
}

}  // namespace lindex::integrators
