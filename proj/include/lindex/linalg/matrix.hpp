#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lindex/error.hpp"
#include "lindex/linalg/gemm.hpp"

namespace lindex::linalg {

template <class T>
struct scalar_traits {
  using real_type = T;
};

template <class R>
struct scalar_traits<std::complex<R>> {
  using real_type = R;
};

template <class T>
using real_t = typename scalar_traits<T>::real_type;

template <class T>
inline T conj_value(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return v;
  } else {
    return std::conj(v);
  }
}

/// Dense row-major matrix.
///
/// A default-constructed matrix is empty (0 x 0) and only useful as a
/// placeholder; every sized constructor requires rows, cols >= 1.
template <class T>
class Matrix {
 public:
  using value_type = T;
  using real_type = real_t<T>;

  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols) {
    check_shape(rows, cols);
    data_.assign(rows * cols, fill);
  }

  Matrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    check_shape(rows, cols);
    if (data_.size() != rows * cols)
      throw ContractViolation("Matrix: entry count " + std::to_string(data_.size()) +
                              " does not match shape " + std::to_string(rows) + "x" +
                              std::to_string(cols));
  }

  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    check_shape(rows_, cols_);
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw ContractViolation("Matrix: ragged initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  static Matrix zero(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
  [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> entries() noexcept { return data_; }
  std::span<const T> entries() const noexcept { return data_; }

  Matrix& operator+=(const Matrix& other) {
    require_same_shape(other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }

  Matrix& operator-=(const Matrix& other) {
    require_same_shape(other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
  }

  Matrix& operator*=(const T& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  /// this += s * other
  Matrix& add_scaled(const T& s, const Matrix& other) {
    require_same_shape(other, "add_scaled");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
    return *this;
  }

  void set_zero() { std::fill(data_.begin(), data_.end(), T{}); }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) { return a *= T{-1}; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  void require_same_shape(const Matrix& other, const char* what) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
      throw ContractViolation(std::string(what) + ": shape mismatch " + shape_string() + " vs " +
                              other.shape_string());
  }

  [[nodiscard]] std::string shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

 private:
  static void check_shape(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw ContractViolation("Matrix: dimensions must be >= 1");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Complex = std::complex<double>;
using ComplexMatrix = Matrix<Complex>;

/// c = alpha * a * b + beta * c
template <class T>
void gemm(const T& alpha, const Matrix<T>& a, const Matrix<T>& b, const T& beta, Matrix<T>& c) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols())
    throw ContractViolation("gemm: incompatible shapes " + a.shape_string() + " * " +
                            b.shape_string() + " -> " + c.shape_string());
  if (beta == T{}) {
    c.set_zero();
  } else if (beta != T{1}) {
    c *= beta;
  }
  detail::gemm_accumulate(a.rows(), b.cols(), a.cols(), alpha, a.data(), b.data(), c.data());
}

template <class T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows())
    throw ContractViolation("matmul: incompatible shapes " + a.shape_string() + " * " +
                            b.shape_string());
  Matrix<T> c(a.rows(), b.cols());
  detail::gemm_accumulate(a.rows(), b.cols(), a.cols(), T{1}, a.data(), b.data(), c.data());
  return c;
}

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  return matmul(a, b);
}

template <class T>
std::vector<T> matvec(const Matrix<T>& a, std::span<const T> x) {
  if (a.cols() != x.size())
    throw ContractViolation("matvec: matrix " + a.shape_string() + " vs vector of length " +
                            std::to_string(x.size()));
  std::vector<T> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    T acc{};
    const T* row = a.data() + i * a.cols();
    for (std::size_t j = 0; j < a.cols(); ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

template <class T>
Matrix<T> transpose(const Matrix<T>& m) {
  Matrix<T> t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

template <class T>
Matrix<T> conjugate(Matrix<T> m) {
  for (auto& v : m.entries()) v = conj_value(v);
  return m;
}

template <class T>
Matrix<T> adjoint(const Matrix<T>& m) {
  Matrix<T> t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = conj_value(m(i, j));
  return t;
}

template <class T>
T trace(const Matrix<T>& m) {
  if (!m.is_square()) throw ContractViolation("trace: matrix is not square");
  T acc{};
  for (std::size_t i = 0; i < m.rows(); ++i) acc += m(i, i);
  return acc;
}

template <class T>
real_t<T> frobenius_norm(const Matrix<T>& m) {
  real_t<T> acc{};
  for (const auto& v : m.entries()) acc += std::norm(v);
  return std::sqrt(acc);
}

template <class T>
real_t<T> max_abs_entry(const Matrix<T>& m) {
  real_t<T> best{};
  for (const auto& v : m.entries()) best = std::max(best, static_cast<real_t<T>>(std::abs(v)));
  return best;
}

template <class T>
real_t<T> max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
  a.require_same_shape(b, "max_abs_diff");
  real_t<T> best{};
  for (std::size_t i = 0; i < a.size(); ++i)
    best = std::max(best, static_cast<real_t<T>>(std::abs(a.data()[i] - b.data()[i])));
  return best;
}

/// ||m - m^dagger||_F / ||m||_F, or the absolute value when m is zero.
template <class T>
real_t<T> hermiticity_error(const Matrix<T>& m) {
  if (!m.is_square()) throw ContractViolation("hermiticity_error: matrix is not square");
  real_t<T> diff{};
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) diff += std::norm(m(i, j) - conj_value(m(j, i)));
  diff = std::sqrt(diff);
  const real_t<T> scale = frobenius_norm(m);
  return scale > 0 ? diff / scale : diff;
}

template <class T>
bool all_finite(const Matrix<T>& m) {
  for (const auto& v : m.entries()) {
    if constexpr (std::is_arithmetic_v<T>) {
      if (!std::isfinite(v)) return false;
    } else {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  }
  return true;
}

/// Bytes needed to store a rows x cols matrix of T; saturates on overflow.
template <class T>
std::uint64_t dense_bytes(std::uint64_t rows, std::uint64_t cols) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  if (rows != 0 && cols > kMax / rows) return kMax;
  const std::uint64_t count = rows * cols;
  if (count > kMax / sizeof(T)) return kMax;
  return count * sizeof(T);
}

/// Kronecker product: block (i, j) of the result is a(i, j) * b.
template <class T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b, const MemoryBudget& budget = {}) {
  const std::uint64_t rows = std::uint64_t{a.rows()} * b.rows();
  const std::uint64_t cols = std::uint64_t{a.cols()} * b.cols();
  budget.require(dense_bytes<T>(rows, cols), "kron " + a.shape_string() + " (x) " + b.shape_string());
  Matrix<T> out(rows, cols);
  const std::size_t p = b.rows();
  const std::size_t q = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const T aij = a(i, j);
      if (aij == T{}) continue;
      for (std::size_t k = 0; k < p; ++k) {
        T* dst = out.data() + (i * p + k) * cols + j * q;
        const T* src = b.data() + k * q;
        for (std::size_t l = 0; l < q; ++l) dst[l] = aij * src[l];
      }
    }
  return out;
}

/// Element-wise conversion between scalar types (e.g. to extended precision).
template <class To, class From>
Matrix<To> cast(const Matrix<From>& m) {
  std::vector<To> out;
  out.reserve(m.size());
  for (const auto& v : m.entries()) {
    if constexpr (std::is_arithmetic_v<From>) {
      out.push_back(static_cast<To>(v));
    } else {
      out.emplace_back(static_cast<real_t<To>>(v.real()), static_cast<real_t<To>>(v.imag()));
    }
  }
  return Matrix<To>(m.rows(), m.cols(), std::move(out));
}

}  // namespace lindex::linalg
