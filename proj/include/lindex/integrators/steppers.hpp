#pragma once

// Single-step integrators: the matrix-side Taylor series, the two
// vectorized variants, and classical RK4.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "lindex/error.hpp"
#include "lindex/integrators/error_bound.hpp"
#include "lindex/linalg/expm.hpp"
#include "lindex/linalg/matrix.hpp"
#include "lindex/master/model.hpp"

namespace lindex::integrators {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::Matrix;
using master::DensityMatrix;
using master::LindbladGenerator;
using master::LindbladModel;
using master::VectorizedState;

struct StepReport {
  double trace_drift = 0.0;
  std::optional<double> error_bound;  // only when ||L|| is known
  std::size_t terms_used = 0;
};

namespace detail {

inline void require_non_negative(double dt, const char* what) {
  if (!(dt >= 0)) throw ContractViolation(std::string(what) + ": dt must be non-negative");
}

template <class T>
double real_trace(const Matrix<T>& m) {
  return static_cast<double>(linalg::trace(m).real());
}

}  // namespace detail

/// sum_{k=0}^{n} dt^k / k! L^k rho via n applications of the generator.
///
/// rho_m carries L^k rho; the running coefficient dt^k / k! is built up
/// incrementally.
template <LindbladGenerator G>
typename G::matrix_type taylor_series(const G& gen, const typename G::matrix_type& rho,
                                      linalg::real_t<typename G::matrix_type::value_type> dt,
                                      unsigned n) {
  using T = typename G::matrix_type::value_type;
  detail::require_non_negative(static_cast<double>(dt), "taylor_step");
  if (rho.rows() != gen.dimension() || rho.cols() != gen.dimension())
    throw ContractViolation("taylor_step: state is " + rho.shape_string() +
                            ", model dimension is " + std::to_string(gen.dimension()));
  typename G::matrix_type rho_m = rho;
  typename G::matrix_type rho_sum = rho;
  if (dt == 0) return rho_sum;
  linalg::real_t<T> coeff = 1;
  for (unsigned k = 1; k <= n; ++k) {
    rho_m = gen.apply(rho_m);
    coeff *= dt / static_cast<linalg::real_t<T>>(k);
    rho_sum.add_scaled(T{coeff}, rho_m);
  }
  return rho_sum;
}

/// One TaylorSeries-n step. The report carries the relative truncation
/// bound when norm_l is given.
template <class T>
std::pair<DensityMatrix<T>, StepReport> taylor_step(const LindbladModel<T>& model,
                                                    const DensityMatrix<T>& rho, double dt,
                                                    unsigned n,
                                                    std::optional<double> norm_l = std::nullopt) {
  auto next = taylor_series(model, rho.matrix(), static_cast<linalg::real_t<T>>(dt), n);
  StepReport report;
  report.terms_used = dt == 0 ? 0 : n;
  report.trace_drift = detail::real_trace(next) - detail::real_trace(rho.matrix());
  if (norm_l) report.error_bound = truncation_error_bound(*norm_l, dt, n).relative;
  return {DensityMatrix<T>::unchecked(std::move(next)), report};
}

/// Classical fourth-order Runge-Kutta on d rho / dt = L rho.
template <LindbladGenerator G>
typename G::matrix_type rk4(const G& gen, const typename G::matrix_type& rho,
                            linalg::real_t<typename G::matrix_type::value_type> dt) {
  using T = typename G::matrix_type::value_type;
  using R = linalg::real_t<T>;
  detail::require_non_negative(static_cast<double>(dt), "rk4_step");
  const T half_dt{dt / R{2}};
  const auto k1 = gen.apply(rho);
  auto probe = rho;
  probe.add_scaled(half_dt, k1);
  const auto k2 = gen.apply(probe);
  probe = rho;
  probe.add_scaled(half_dt, k2);
  const auto k3 = gen.apply(probe);
  probe = rho;
  probe.add_scaled(T{dt}, k3);
  const auto k4 = gen.apply(probe);
  auto next = rho;
  const T w{dt / R{6}};
  next.add_scaled(w, k1);
  next.add_scaled(w * R{2}, k2);
  next.add_scaled(w * R{2}, k3);
  next.add_scaled(w, k4);
  return next;
}

template <class T>
std::pair<DensityMatrix<T>, StepReport> rk4_step(const LindbladModel<T>& model,
                                                 const DensityMatrix<T>& rho, double dt) {
  auto next = rk4(model, rho.matrix(), static_cast<linalg::real_t<T>>(dt));
  StepReport report;
  report.terms_used = 4;
  report.trace_drift = detail::real_trace(next) - detail::real_trace(rho.matrix());
  return {DensityMatrix<T>::unchecked(std::move(next)), report};
}

// ---------------------------------------------------------------------------
// Vectorized methods
// ---------------------------------------------------------------------------

namespace detail {

inline void require_superop(const ComplexMatrix& superop, const VectorizedState<Complex>& v) {
  if (!superop.is_square() || superop.cols() != v.vec.size())
    throw ContractViolation("vectorized step: superoperator " + superop.shape_string() +
                            " does not match state of length " + std::to_string(v.vec.size()));
}

}  // namespace detail

/// expm(superop * dt) |v>>
inline VectorizedState<Complex> vec_full_step(const ComplexMatrix& superop,
                                              const VectorizedState<Complex>& v, double dt,
                                              const linalg::ExpmConfig& cfg = {}) {
  detail::require_superop(superop, v);
  detail::require_non_negative(dt, "vec_full_step");
  if (dt == 0) return v;
  const ComplexMatrix propagator = linalg::expm(superop * Complex(dt), cfg);
  return {linalg::matvec(propagator, std::span<const Complex>(v.vec))};
}

/// sum_{k=0}^{n} dt^k / k! superop^k |v>> by repeated matrix-vector products.
inline VectorizedState<Complex> vec_taylor_step(const ComplexMatrix& superop,
                                                const VectorizedState<Complex>& v, double dt,
                                                unsigned n) {
  detail::require_superop(superop, v);
  detail::require_non_negative(dt, "vec_taylor_step");
  std::vector<Complex> term = v.vec;
  std::vector<Complex> sum = v.vec;
  if (dt == 0) return {sum};
  double coeff = 1.0;
  for (unsigned k = 1; k <= n; ++k) {
    term = linalg::matvec(superop, std::span<const Complex>(term));
    coeff *= dt / static_cast<double>(k);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += coeff * term[i];
  }
  return {std::move(sum)};
}

/// vec_full_step with the propagator cached per (superoperator, dt).
class VecFullStepper {
 public:
  explicit VecFullStepper(const ComplexMatrix& superop, linalg::ExpmConfig cfg = {})
      : superop_(&superop), cfg_(cfg) {}

  VectorizedState<Complex> step(const VectorizedState<Complex>& v, double dt) {
    detail::require_superop(*superop_, v);
    detail::require_non_negative(dt, "vec_full_step");
    if (dt == 0) return v;
    if (!cached_dt_ || *cached_dt_ != dt) {
      propagator_ = linalg::expm(*superop_ * Complex(dt), cfg_);
      cached_dt_ = dt;
    }
    return {linalg::matvec(propagator_, std::span<const Complex>(v.vec))};
  }

  [[nodiscard]] const linalg::ExpmConfig& expm_config() const noexcept { return cfg_; }

 private:
  const ComplexMatrix* superop_;
  linalg::ExpmConfig cfg_;
  std::optional<double> cached_dt_;
  ComplexMatrix propagator_;
};

}  // namespace lindex::integrators
