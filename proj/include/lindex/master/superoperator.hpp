#pragma once

#include <cstdint>
#include <string>

#include "lindex/error.hpp"
#include "lindex/linalg/matrix.hpp"
#include "lindex/linalg/spectral.hpp"
#include "lindex/master/model.hpp"
#include "lindex/random.hpp"

namespace lindex::master {

/// Bytes for the d^2 x d^2 superoperator of a d-dimensional model.
template <class T = Complex>
std::uint64_t superoperator_bytes(std::uint64_t d) {
  return linalg::dense_bytes<T>(d * d, d * d);
}

/// Matrix form of the Lindbladian acting on column-stacked states:
///   -(i/hbar)(I (x) H - H^T (x) I)
///   + sum_i [ L_i^* (x) L_i - 1/2 (I (x) L_i^dag L_i + (L_i^dag L_i)^T (x) I) ]
template <class T>
Matrix<T> build_superoperator(const LindbladModel<T>& model, const MemoryBudget& budget = {}) {
  const std::size_t d = model.dimension();
  budget.require(superoperator_bytes<T>(d), "superoperator for d=" + std::to_string(d));
  const Matrix<T> id = Matrix<T>::identity(d);
  const T minus_i_over_hbar = T(0, -1) / model.hbar();
  Matrix<T> out = linalg::kron(id, model.hamiltonian(), budget);
  out -= linalg::kron(linalg::transpose(model.hamiltonian()), id, budget);
  out *= minus_i_over_hbar;
  for (std::size_t i = 0; i < model.jump_ops().size(); ++i) {
    const auto& l = model.jump_ops()[i];
    const auto& ldl = model.jump_product(i);
    out += linalg::kron(linalg::conjugate(l), l, budget);
    out.add_scaled(T(-0.5), linalg::kron(id, ldl, budget));
    out.add_scaled(T(-0.5), linalg::kron(linalg::transpose(ldl), id, budget));
  }
  return out;
}

enum class NormStrategy { exact_small, random_probe };

inline constexpr std::size_t kDefaultProbeSamples = 32;
inline constexpr double kProbeSafetyFactor = 1.2;

struct NormOptions {
  NormStrategy strategy = NormStrategy::random_probe;
  std::size_t samples = kDefaultProbeSamples;
  MemoryBudget budget{};
  std::uint64_t seed = 0x1d2c3b4a;
};

/// ||L|| = sup ||L M||_F / ||M||_F.
///
/// exact_small: largest singular value of the superoperator matrix.
/// random_probe: max ratio over Gaussian probes, times kProbeSafetyFactor.
inline double lindbladian_norm(const LindbladModel<Complex>& model, const NormOptions& opts = {}) {
  const std::size_t d = model.dimension();
  if (opts.strategy == NormStrategy::exact_small) {
    const auto required = superoperator_bytes<Complex>(d);
    if (!opts.budget.allows(required))
      throw MemoryBudgetExceeded(required, opts.budget.bytes,
                                 "lindbladian_norm(exact_small) for d=" + std::to_string(d) +
                                     "; use strategy random_probe");
    return linalg::spectral_norm(build_superoperator(model, opts.budget)).value;
  }
  if (opts.samples < 1) throw ContractViolation("lindbladian_norm: samples must be >= 1");
  StreamRng rng(opts.seed, 0);
  double best = 0.0;
  for (std::size_t s = 0; s < opts.samples; ++s) {
    ComplexMatrix probe(d, d);
    for (auto& v : probe.entries()) v = Complex(rng.normal(), rng.normal());
    const double denom = linalg::frobenius_norm(probe);
    if (denom == 0.0) continue;
    best = std::max(best, linalg::frobenius_norm(model.apply(probe)) / denom);
  }
  return best * kProbeSafetyFactor;
}

}  // namespace lindex::master
