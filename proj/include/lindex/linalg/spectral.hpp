#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "lindex/error.hpp"
#include "lindex/linalg/matrix.hpp"
#include "lindex/random.hpp"

namespace lindex::linalg {

struct SpectralEstimate {
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Largest singular value by power iteration on m^dagger m.
///
/// Stops once successive estimates differ by less than tol relatively. The
/// start vector is a fixed pseudo-random draw, so results are reproducible.
template <class T>
SpectralEstimate spectral_norm(const Matrix<T>& m, std::size_t iters = 2000, double tol = 1e-13) {
  if (iters < 1) throw ContractViolation("spectral_norm: iters must be >= 1");
  const std::size_t n = m.cols();
  StreamRng rng(0x5eed5eedull, 0);
  std::vector<T> v(n);
  for (auto& x : v) {
    if constexpr (std::is_arithmetic_v<T>) {
      x = static_cast<T>(rng.normal());
    } else {
      x = T(static_cast<real_t<T>>(rng.normal()), static_cast<real_t<T>>(rng.normal()));
    }
  }
  const Matrix<T> mh = adjoint(m);
  auto normalize = [](std::vector<T>& x) {
    real_t<T> s{};
    for (const auto& e : x) s += std::norm(e);
    s = std::sqrt(s);
    if (s > 0)
      for (auto& e : x) e /= s;
    return s;
  };
  normalize(v);
  SpectralEstimate est;
  double previous = -1.0;
  for (std::size_t it = 1; it <= iters; ++it) {
    std::vector<T> mv = matvec(m, std::span<const T>(v));
    real_t<T> sq{};
    for (const auto& e : mv) sq += std::norm(e);
    const double sigma = std::sqrt(static_cast<double>(sq));  // ||m v|| with ||v|| = 1
    est.value = sigma;
    est.iterations = it;
    if (sigma == 0.0) {
      est.converged = true;
      return est;
    }
    if (previous >= 0.0 && std::abs(sigma - previous) <= tol * sigma) {
      est.converged = true;
      return est;
    }
    previous = sigma;
    v = matvec(mh, std::span<const T>(mv));
    if (normalize(v) == 0) {
      est.converged = true;
      return est;
    }
  }
  return est;
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi sweeps.
/// Eigenvalues ascending; eigenvectors are the columns of `vectors`.
struct SymmetricEigen {
  std::vector<double> values;
  Matrix<double> vectors;
};

inline SymmetricEigen symmetric_eigen(Matrix<double> a, double tol = 1e-15,
                                      std::size_t max_sweeps = 100) {
  if (!a.is_square()) throw ContractViolation("symmetric_eigen: matrix is not square");
  const std::size_t n = a.rows();
  Matrix<double> v = Matrix<double>::identity(n);
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        total += a(i, j) * a(i, j);
        if (i != j) off += a(i, j) * a(i, j);
      }
    if (off <= tol * tol * total) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen out{std::vector<double>(n), Matrix<double>(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

namespace detail {

// H = A + iB  ->  [[A, -B], [B, A]]; each eigenvalue of H appears twice.
inline Matrix<double> real_embedding(const ComplexMatrix& h) {
  const std::size_t d = h.rows();
  Matrix<double> e(2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      // Symmetrize so roundoff-level anti-Hermitian parts do not break Jacobi.
      const Complex v = 0.5 * (h(i, j) + std::conj(h(j, i)));
      e(i, j) = v.real();
      e(i + d, j + d) = v.real();
      e(i, j + d) = -v.imag();
      e(i + d, j) = v.imag();
    }
  return e;
}

}  // namespace detail

/// Eigenvalues (ascending) of the Hermitian part of h.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
  if (!h.is_square()) throw ContractViolation("hermitian_eigenvalues: matrix is not square");
  const auto eig = symmetric_eigen(detail::real_embedding(h));
  std::vector<double> out;
  out.reserve(h.rows());
  for (std::size_t i = 0; i < eig.values.size(); i += 2) out.push_back(eig.values[i]);
  return out;
}

/// f(h) for Hermitian h, evaluated in the eigenbasis.
inline ComplexMatrix hermitian_function(const ComplexMatrix& h,
                                        const std::function<double(double)>& f) {
  if (!h.is_square()) throw ContractViolation("hermitian_function: matrix is not square");
  const std::size_t d = h.rows();
  const auto eig = symmetric_eigen(detail::real_embedding(h));
  const std::size_t n = 2 * d;
  Matrix<double> fe(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = eig.vectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) fe(i, j) += vik * eig.vectors(j, k);
    }
  }
  ComplexMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(i, j) = Complex(fe(i, j), fe(i + d, j));
  return out;
}

}  // namespace lindex::linalg
