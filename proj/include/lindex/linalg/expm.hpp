#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "lindex/error.hpp"
#include "lindex/linalg/matrix.hpp"

namespace lindex::linalg {

enum class ExpmMethod { taylor_ss, pade_ss };

inline constexpr unsigned kDefaultTaylorOrder = 16;
inline constexpr unsigned kDefaultPadeDegree = 6;

struct ExpmConfig {
  ExpmMethod method = ExpmMethod::pade_ss;
  unsigned order = kDefaultPadeDegree;  // Taylor truncation order or Pade degree
  std::optional<unsigned> scaling;      // s; chosen from the norm when absent

  static ExpmConfig taylor(unsigned order = kDefaultTaylorOrder) {
    return {ExpmMethod::taylor_ss, order, std::nullopt};
  }
  static ExpmConfig pade(unsigned degree = kDefaultPadeDegree) {
    return {ExpmMethod::pade_ss, degree, std::nullopt};
  }
};

inline const char* to_string(ExpmMethod m) {
  return m == ExpmMethod::taylor_ss ? "taylor_ss" : "pade_ss";
}

/// Smallest s >= 0 with norm / 2^s <= 1.
template <class R>
unsigned auto_scaling(R frobenius) {
  if (!(frobenius > R{1})) return 0;
  auto s = static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(frobenius))));
  while (std::ldexp(static_cast<double>(frobenius), -static_cast<int>(s)) > 1.0) ++s;
  return s;
}

/// Solves a * x = b by LU with partial pivoting. Throws NumericalFailure
/// when a pivot vanishes relative to the largest entry of a.
template <class T>
Matrix<T> lu_solve(Matrix<T> a, Matrix<T> b) {
  using R = real_t<T>;
  if (!a.is_square() || a.rows() != b.rows())
    throw ContractViolation("lu_solve: incompatible shapes " + a.shape_string() + " and " +
                            b.shape_string());
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  const R scale = max_abs_entry(a);
  const R tiny = scale * std::numeric_limits<R>::epsilon() * static_cast<R>(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    R best = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const R v = std::abs(a(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (!(best > tiny)) throw NumericalFailure("lu_solve: matrix is numerically singular");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(b(col, j), b(pivot, j));
    }
    const T inv = T{1} / a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const T f = a(r, col) * inv;
      if (f == T{}) continue;
      a(r, col) = T{};
      for (std::size_t j = col + 1; j < n; ++j) a(r, j) -= f * a(col, j);
      for (std::size_t j = 0; j < m; ++j) b(r, j) -= f * b(col, j);
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    const T inv = T{1} / a(c, c);
    for (std::size_t j = 0; j < m; ++j) {
      T acc = b(c, j);
      for (std::size_t k = c + 1; k < n; ++k) acc -= a(c, k) * b(k, j);
      b(c, j) = acc * inv;
    }
  }
  return b;
}

namespace detail {

// sum_{k=0}^{n} x^k / k!, Horner form: I + x/1 (I + x/2 (I + ... ))
template <class T>
Matrix<T> taylor_polynomial(const Matrix<T>& x, unsigned order) {
  const std::size_t n = x.rows();
  Matrix<T> acc = Matrix<T>::identity(n);
  Matrix<T> tmp(n, n);
  for (unsigned k = order; k >= 1; --k) {
    gemm(T{1} / static_cast<real_t<T>>(k), x, acc, T{}, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp(i, i) += T{1};
    std::swap(acc, tmp);
  }
  return acc;
}

// Diagonal Pade R_{m,m} = P_m(x) / P_m(-x) with
// P_m(x) = sum_k (2m-k)! m! / ((2m)! (m-k)! k!) x^k.
template <class T>
Matrix<T> pade_approximant(const Matrix<T>& x, unsigned degree) {
  using R = real_t<T>;
  const std::size_t n = x.rows();
  Matrix<T> numer = Matrix<T>::identity(n);
  Matrix<T> denom = Matrix<T>::identity(n);
  Matrix<T> power = Matrix<T>::identity(n);
  R coeff = 1;
  for (unsigned k = 1; k <= degree; ++k) {
    coeff *= static_cast<R>(degree - k + 1) / static_cast<R>((2 * degree - k + 1) * k);
    power = matmul(power, x);
    numer.add_scaled(T{coeff}, power);
    denom.add_scaled(T{(k % 2 == 0) ? coeff : -coeff}, power);
  }
  try {
    return lu_solve(std::move(denom), std::move(numer));
  } catch (const NumericalFailure&) {
    throw NumericalFailure(
        "expm: Pade denominator Q_m is numerically singular; retry with method taylor_ss");
  }
}

}  // namespace detail

/// Matrix exponential by truncated Taylor or diagonal Pade, with scaling and squaring.
template <class T>
Matrix<T> expm(const Matrix<T>& m, const ExpmConfig& cfg = {}) {
  if (!m.is_square()) throw ContractViolation("expm: matrix is not square");
  if (cfg.order < 1) throw ContractViolation("expm: order must be >= 1");
  if (!all_finite(m)) throw NumericalFailure("expm: input has non-finite entries");
  const unsigned s = cfg.scaling.value_or(auto_scaling(frobenius_norm(m)));
  Matrix<T> scaled = m;
  if (s > 0) scaled *= T{static_cast<real_t<T>>(std::ldexp(1.0, -static_cast<int>(s)))};
  Matrix<T> result = cfg.method == ExpmMethod::taylor_ss
                         ? detail::taylor_polynomial(scaled, cfg.order)
                         : detail::pade_approximant(scaled, cfg.order);
  Matrix<T> tmp(m.rows(), m.cols());
  for (unsigned i = 0; i < s; ++i) {
    gemm(T{1}, result, result, T{}, tmp);
    std::swap(result, tmp);
  }
  if (!all_finite(result))
    throw NumericalFailure(std::string("expm(") + to_string(cfg.method) +
                           "): result has non-finite entries");
  return result;
}

}  // namespace lindex::linalg
