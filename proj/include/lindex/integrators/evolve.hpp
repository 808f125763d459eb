#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lindex/error.hpp"
#include "lindex/integrators/error_bound.hpp"
#include "lindex/integrators/steppers.hpp"
#include "lindex/linalg/expm.hpp"
#include "lindex/master/superoperator.hpp"

namespace lindex::integrators {

enum class Method { taylor_series, vectorization_full, vectorization_taylor, rk4 };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::taylor_series: return "taylor_series";
    case Method::vectorization_full: return "vectorization_full";
    case Method::vectorization_taylor: return "vectorization_taylor";
    case Method::rk4: return "rk4";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(const std::string& s) {
  for (Method m : {Method::taylor_series, Method::vectorization_full, Method::vectorization_taylor,
                   Method::rk4})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

inline bool uses_order(Method m) {
  return m == Method::taylor_series || m == Method::vectorization_taylor;
}

inline bool uses_superoperator(Method m) {
  return m == Method::vectorization_full || m == Method::vectorization_taylor;
}

inline constexpr unsigned kDefaultMaxOrder = 40;

struct IntegratorSpec {
  Method method = Method::taylor_series;
  double dt = 0.1;
  unsigned order = 10;
  std::optional<double> error_target;      // picks the order adaptively when set
  std::optional<double> lindbladian_norm;  // enables per-step error bounds
  unsigned max_order = kDefaultMaxOrder;
  linalg::ExpmConfig expm = linalg::ExpmConfig::pade();  // vectorization_full only

  void validate() const {
    if (!(dt > 0) || !std::isfinite(dt)) throw ContractViolation("IntegratorSpec: dt must be > 0");
    if (uses_order(method) && !error_target && order < 1)
      throw ContractViolation("IntegratorSpec: order must be >= 1");
    if (error_target && !(*error_target > 0))
      throw ContractViolation("IntegratorSpec: error_target must be positive");
  }
};

struct Sample {
  double t = 0.0;
  DensityMatrix<Complex> rho;
  StepReport report;  // trace_drift is cumulative, relative to rho(0)
};

struct Evolution {
  std::vector<Sample> samples;
  std::size_t steps = 0;
  std::size_t apply_count = 0;  // generator applications (matrix-side methods)
  unsigned order_used = 0;
  bool order_target_reached = true;
  std::optional<double> lindbladian_norm;
};

/// Number of full dt steps in [0, t_final] and the leftover partial step.
inline std::pair<std::size_t, double> step_plan(double t_final, double dt) {
  const double ratio = t_final / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest))
    return {static_cast<std::size_t>(nearest), 0.0};
  const auto full = static_cast<std::size_t>(std::floor(ratio));
  return {full, t_final - static_cast<double>(full) * dt};
}

/// Norm used for error bounds and adaptive order: exact for small models,
/// random probes otherwise.
inline double estimate_lindbladian_norm(const LindbladModel<Complex>& model,
                                        const MemoryBudget& budget) {
  constexpr std::uint64_t kExactLimit = std::uint64_t{64} << 20;
  master::NormOptions opts;
  opts.budget = budget;
  const auto bytes = master::superoperator_bytes<Complex>(model.dimension());
  opts.strategy = bytes <= kExactLimit && budget.allows(bytes) ? master::NormStrategy::exact_small
                                                               : master::NormStrategy::random_probe;
  return master::lindbladian_norm(model, opts);
}

namespace detail {

template <class E>
[[noreturn]] void rethrow_at_step(const E& e, std::size_t step) {
  throw E(std::string("step ") + std::to_string(step) + ": " + e.what());
}

}  // namespace detail

/// Runs the selected stepper from 0 to t_final.
///
/// Samples are taken at t = 0, after every sample_every steps, and at
/// t_final when it is not already on that grid (reached with a shorter
/// final step if t_final is not a multiple of dt).
inline Evolution evolve(const LindbladModel<Complex>& model, const DensityMatrix<Complex>& rho0,
                        const IntegratorSpec& spec, double t_final, std::size_t sample_every = 1,
                        const MemoryBudget& budget = {}) {
  spec.validate();
  if (!(t_final >= 0)) throw ContractViolation("evolve: t_final must be non-negative");
  if (sample_every < 1) throw ContractViolation("evolve: sample_every must be >= 1");
  if (rho0.dimension() != model.dimension())
    throw ContractViolation("evolve: initial state dimension " + std::to_string(rho0.dimension()) +
                            " does not match model dimension " + std::to_string(model.dimension()));

  Evolution out;
  out.lindbladian_norm = spec.lindbladian_norm;
  unsigned order = spec.order;
  if (spec.error_target && uses_order(spec.method)) {
    if (!out.lindbladian_norm) out.lindbladian_norm = estimate_lindbladian_norm(model, budget);
    const auto choice = choose_order(*out.lindbladian_norm, spec.dt, *spec.error_target, spec.max_order);
    order = choice.order;
    out.order_target_reached = choice.reached;
  }
  out.order_used = uses_order(spec.method) ? order : 0;

  const double trace0 = detail::real_trace(rho0.matrix());
  const auto [full_steps, partial] = step_plan(t_final, spec.dt);

  std::optional<ComplexMatrix> superop;
  if (uses_superoperator(spec.method)) superop = master::build_superoperator(model, budget);
  std::optional<VecFullStepper> full_stepper;
  if (spec.method == Method::vectorization_full) full_stepper.emplace(*superop, spec.expm);

  master::CountingGenerator<LindbladModel<Complex>> gen(model);
  ComplexMatrix rho = rho0.matrix();
  std::optional<VectorizedState<Complex>> vec;
  if (superop) vec = master::vectorize(rho);

  auto record = [&](double t, const StepReport& last) {
    if (vec) rho = master::devectorize(*vec);
    StepReport rep = last;
    rep.trace_drift = detail::real_trace(rho) - trace0;
    out.samples.push_back({t, DensityMatrix<Complex>::unchecked(rho), rep});
  };

  auto do_step = [&](double h, std::size_t index) {
    StepReport rep;
    try {
      switch (spec.method) {
        case Method::taylor_series:
          rho = taylor_series(gen, rho, h, order);
          rep.terms_used = order;
          break;
        case Method::rk4:
          rho = rk4(gen, rho, h);
          rep.terms_used = 4;
          break;
        case Method::vectorization_full:
          *vec = full_stepper->step(*vec, h);
          rep.terms_used = spec.expm.order;
          break;
        case Method::vectorization_taylor:
          *vec = vec_taylor_step(*superop, *vec, h, order);
          rep.terms_used = order;
          break;
      }
    } catch (const NumericalFailure& e) {
      detail::rethrow_at_step(e, index);
    } catch (const ContractViolation& e) {
      detail::rethrow_at_step(e, index);
    }
    if (!vec && !linalg::all_finite(rho))
      throw NumericalFailure("step " + std::to_string(index) + ": state has non-finite entries");
    if (uses_order(spec.method) && out.lindbladian_norm)
      rep.error_bound = truncation_error_bound(*out.lindbladian_norm, h, order).relative;
    ++out.steps;
    return rep;
  };

  record(0.0, StepReport{});
  StepReport last;
  for (std::size_t k = 1; k <= full_steps; ++k) {
    last = do_step(spec.dt, k);
    if (k % sample_every == 0) record(static_cast<double>(k) * spec.dt, last);
  }
  if (partial > 0) {
    last = do_step(partial, full_steps + 1);
    record(t_final, last);
  } else if (full_steps % sample_every != 0) {
    record(t_final, last);
  }
  out.apply_count = gen.count();
  return out;
}

}  // namespace lindex::integrators
