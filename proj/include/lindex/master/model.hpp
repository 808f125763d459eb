#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lindex/error.hpp"
#include "lindex/linalg/matrix.hpp"
#include "lindex/linalg/spectral.hpp"

namespace lindex::master {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::Matrix;

inline constexpr double kHermitianTolerance = 1e-12;

/// Anything that can apply a Lindbladian to a d x d matrix.
template <class G>
concept LindbladGenerator = requires(const G& g, const typename G::matrix_type& m) {
  typename G::matrix_type;
  { g.apply(m) } -> std::convertible_to<typename G::matrix_type>;
  { g.dimension() } -> std::convertible_to<std::size_t>;
};

/// Hamiltonian, jump operators and hbar of a Markovian master equation.
///
/// Products that do not depend on the state (L^dagger and L^dagger L) are
/// formed once at construction.
template <class T = Complex>
class LindbladModel {
 public:
  using scalar_type = T;
  using real_type = linalg::real_t<T>;
  using matrix_type = Matrix<T>;

  LindbladModel(Matrix<T> hamiltonian, std::vector<Matrix<T>> jump_ops, real_type hbar = 1)
      : hbar_(hbar), hamiltonian_(std::move(hamiltonian)), jump_ops_(std::move(jump_ops)) {
    if (!(hbar_ > 0)) throw ContractViolation("LindbladModel: hbar must be positive");
    if (!hamiltonian_.is_square())
      throw ContractViolation("LindbladModel: Hamiltonian is not square (" +
                              hamiltonian_.shape_string() + ")");
    const auto herm = linalg::hermiticity_error(hamiltonian_);
    if (herm > static_cast<real_type>(kHermitianTolerance))
      throw ContractViolation("LindbladModel: Hamiltonian is not Hermitian (relative error " +
                              std::to_string(static_cast<double>(herm)) + ")");
    const std::size_t d = hamiltonian_.rows();
    for (std::size_t i = 0; i < jump_ops_.size(); ++i) {
      if (jump_ops_[i].rows() != d || jump_ops_[i].cols() != d)
        throw ContractViolation("LindbladModel: jump operator " + std::to_string(i) + " is " +
                                jump_ops_[i].shape_string() + ", expected " +
                                hamiltonian_.shape_string());
      jump_adjoints_.push_back(linalg::adjoint(jump_ops_[i]));
      jump_products_.push_back(linalg::matmul(jump_adjoints_.back(), jump_ops_[i]));
    }
    drift_ = hamiltonian_ * (T(0, -1) / hbar_);
    for (const auto& p : jump_products_) drift_.add_scaled(T(-0.5), p);
    drift_adjoint_ = linalg::adjoint(drift_);
  }

  [[nodiscard]] real_type hbar() const noexcept { return hbar_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return hamiltonian_.rows(); }
  [[nodiscard]] const Matrix<T>& hamiltonian() const noexcept { return hamiltonian_; }
  [[nodiscard]] const std::vector<Matrix<T>>& jump_ops() const noexcept { return jump_ops_; }
  [[nodiscard]] const Matrix<T>& jump_adjoint(std::size_t i) const { return jump_adjoints_.at(i); }
  /// L_i^dagger L_i
  [[nodiscard]] const Matrix<T>& jump_product(std::size_t i) const { return jump_products_.at(i); }

  /// G = -(i/hbar) H - 1/2 sum_i L_i^dagger L_i
  [[nodiscard]] const Matrix<T>& drift() const noexcept { return drift_; }

  /// (i/hbar)[rho, H] + sum_i (L_i rho L_i^dagger - 1/2 {L_i^dagger L_i, rho}),
  /// evaluated as G rho + rho G^dagger + sum_i L_i rho L_i^dagger.
  [[nodiscard]] Matrix<T> apply(const Matrix<T>& rho) const {
    const std::size_t d = dimension();
    if (rho.rows() != d || rho.cols() != d)
      throw ContractViolation("apply_lindbladian: state is " + rho.shape_string() +
                              ", model dimension is " + std::to_string(d));
    Matrix<T> out(d, d);
    linalg::gemm(T{1}, drift_, rho, T{}, out);
    linalg::gemm(T{1}, rho, drift_adjoint_, T{1}, out);
    if (!jump_ops_.empty()) {
      Matrix<T> tmp(d, d);
      for (std::size_t i = 0; i < jump_ops_.size(); ++i) {
        linalg::gemm(T{1}, jump_ops_[i], rho, T{}, tmp);
        linalg::gemm(T{1}, tmp, jump_adjoints_[i], T{1}, out);
      }
    }
    return out;
  }

 private:
  real_type hbar_;
  Matrix<T> hamiltonian_;
  std::vector<Matrix<T>> jump_ops_;
  std::vector<Matrix<T>> jump_adjoints_;
  std::vector<Matrix<T>> jump_products_;
  Matrix<T> drift_;
  Matrix<T> drift_adjoint_;
};

template <class T>
Matrix<T> apply_lindbladian(const LindbladModel<T>& model, const Matrix<T>& rho) {
  return model.apply(rho);
}

/// Wraps a generator and counts how often it is applied.
template <LindbladGenerator G>
class CountingGenerator {
 public:
  using matrix_type = typename G::matrix_type;

  explicit CountingGenerator(const G& inner) : inner_(&inner) {}

  matrix_type apply(const matrix_type& m) const {
    ++count_;
    return inner_->apply(m);
  }
  [[nodiscard]] std::size_t dimension() const { return inner_->dimension(); }
  [[nodiscard]] std::size_t count() const noexcept { return count_; }
  void reset() noexcept { count_ = 0; }

 private:
  const G* inner_;
  mutable std::size_t count_ = 0;
};

/// Density matrix with its invariants tracked rather than enforced.
///
/// The checked constructor requires a square, Hermitian matrix. Trace and
/// positivity are reported on demand and never corrected.
template <class T = Complex>
class DensityMatrix {
 public:
  using real_type = linalg::real_t<T>;

  explicit DensityMatrix(Matrix<T> m) : mat_(std::move(m)) {
    if (!mat_.is_square())
      throw ContractViolation("DensityMatrix: matrix is not square (" + mat_.shape_string() + ")");
    const auto herm = linalg::hermiticity_error(mat_);
    if (herm > static_cast<real_type>(kHermitianTolerance))
      throw ContractViolation("DensityMatrix: matrix is not Hermitian (relative error " +
                              std::to_string(static_cast<double>(herm)) + ")");
  }

  /// Skips validation; for stepper outputs.
  static DensityMatrix unchecked(Matrix<T> m) {
    DensityMatrix out;
    out.mat_ = std::move(m);
    return out;
  }

  /// |psi><psi|
  static DensityMatrix pure(std::span<const T> psi) {
    Matrix<T> m(psi.size(), psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i)
      for (std::size_t j = 0; j < psi.size(); ++j) m(i, j) = psi[i] * linalg::conj_value(psi[j]);
    return unchecked(std::move(m));
  }

  [[nodiscard]] const Matrix<T>& matrix() const noexcept { return mat_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return mat_.rows(); }
  [[nodiscard]] T trace() const { return linalg::trace(mat_); }
  [[nodiscard]] real_type trace_deviation() const { return std::abs(trace() - T{1}); }
  [[nodiscard]] real_type hermiticity_error() const { return linalg::hermiticity_error(mat_); }

  [[nodiscard]] double min_eigenvalue() const
    requires std::same_as<T, Complex>
  {
    return linalg::hermitian_eigenvalues(mat_).front();
  }

  /// min eigenvalue >= -tol * |Tr rho|
  [[nodiscard]] bool is_positive(double tol = 1e-10) const
    requires std::same_as<T, Complex>
  {
    return min_eigenvalue() >= -tol * std::abs(trace());
  }

 private:
  DensityMatrix() = default;
  Matrix<T> mat_;
};

/// Column-stacked |rho>>: first column on top.
template <class T = Complex>
struct VectorizedState {
  std::vector<T> vec;

  [[nodiscard]] std::size_t dimension() const {
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(vec.size()))));
    if (d == 0 || d * d != vec.size())
      throw ContractViolation("VectorizedState: length " + std::to_string(vec.size()) +
                              " is not a perfect square");
    return d;
  }
};

template <class T>
VectorizedState<T> vectorize(const Matrix<T>& rho) {
  if (!rho.is_square()) throw ContractViolation("vectorize: matrix is not square");
  const std::size_t d = rho.rows();
  VectorizedState<T> out{std::vector<T>(d * d)};
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) out.vec[j * d + i] = rho(i, j);
  return out;
}

template <class T>
Matrix<T> devectorize(const VectorizedState<T>& v) {
  const std::size_t d = v.dimension();
  Matrix<T> rho(d, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) rho(i, j) = v.vec[j * d + i];
  return rho;
}

}  // namespace lindex::master
