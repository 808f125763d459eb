#pragma once

// Model builders and initial states.
//
// Basis convention: site 0 is the most significant tensor factor and
// |up> = (1, 0). The two-level system uses |0> = (1, 0), |1> = (0, 1).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lindex/error.hpp"
#include "lindex/linalg/expm.hpp"
#include "lindex/linalg/matrix.hpp"
#include "lindex/master/model.hpp"

namespace lindex::systems {

using linalg::Complex;
using linalg::ComplexMatrix;
using master::DensityMatrix;
using master::LindbladModel;

using PureState = std::vector<Complex>;

enum class SpinAxis { x, y, z, plus, minus };
enum class Spin { up, down };

struct TwoLevelSpec {
  double energy = 1.0;  // E
  double rabi = 1.0;    // Omega
  double gamma = 0.5;   // decay rate
  double hbar = 1.0;
};

struct SpinChainSpec {
  std::size_t length = 2;  // L
  double coupling = 1.0;   // J
  double gamma = 1.0;
  double hbar = 1.0;
};

/// Single-site spin-1/2 operator (half Pauli matrices, S^+- = S^x +- i S^y).
inline ComplexMatrix local_spin(SpinAxis axis) {
  const Complex i(0, 1);
  switch (axis) {
    case SpinAxis::x: return ComplexMatrix{{0, 0.5}, {0.5, 0}};
    case SpinAxis::y: return ComplexMatrix{{0, -0.5 * i}, {0.5 * i, 0}};
    case SpinAxis::z: return ComplexMatrix{{0.5, 0}, {0, -0.5}};
    case SpinAxis::plus: return ComplexMatrix{{0, 1}, {0, 0}};
    case SpinAxis::minus: return ComplexMatrix{{0, 0}, {1, 0}};
  }
  throw ContractViolation("local_spin: unknown axis");
}

inline std::size_t chain_dimension(std::size_t length) {
  if (length < 1) throw ContractViolation("spin chain length must be >= 1");
  if (length >= 32) throw ContractViolation("spin chain length " + std::to_string(length) + " is too large");
  return std::size_t{1} << length;
}

/// I (x) ... (x) op (x) ... (x) I with `op` acting on sites [site, site + k)
/// where op is 2^k x 2^k.
inline ComplexMatrix embed(const ComplexMatrix& op, std::size_t site, std::size_t length,
                           const MemoryBudget& budget = {}) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < op.rows()) ++k;
  if ((std::size_t{1} << k) != op.rows() || !op.is_square())
    throw ContractViolation("embed: operator is not 2^k x 2^k");
  if (site + k > length)
    throw ContractViolation("embed: site " + std::to_string(site) + " out of range for length " +
                            std::to_string(length));
  const std::size_t d = chain_dimension(length);
  budget.require(linalg::dense_bytes<Complex>(d, d), "spin-chain operator for L=" + std::to_string(length));
  const std::size_t left = std::size_t{1} << site;
  const std::size_t right = std::size_t{1} << (length - site - k);
  ComplexMatrix out = op;
  if (left > 1) out = linalg::kron(ComplexMatrix::identity(left), out, budget);
  if (right > 1) out = linalg::kron(out, ComplexMatrix::identity(right), budget);
  return out;
}

inline ComplexMatrix spin_operator(std::size_t site, SpinAxis axis, std::size_t length,
                                   const MemoryBudget& budget = {}) {
  if (site >= length)
    throw ContractViolation("spin_operator: site " + std::to_string(site) + " out of range [0, " +
                            std::to_string(length) + ")");
  return embed(local_spin(axis), site, length, budget);
}

/// H = E|1><1| + Omega(|0><1| + |1><0|), L = sqrt(Gamma)|0><1|.
inline LindbladModel<Complex> two_level_model(const TwoLevelSpec& spec) {
  if (spec.gamma < 0) throw ContractViolation("two_level_model: gamma must be non-negative");
  ComplexMatrix h{{0, spec.rabi}, {spec.rabi, spec.energy}};
  ComplexMatrix l{{0, std::sqrt(spec.gamma)}, {0, 0}};
  return LindbladModel<Complex>(std::move(h), {std::move(l)}, spec.hbar);
}

/// -J S_a . S_b on two adjacent sites, as a 4 x 4 matrix.
inline ComplexMatrix heisenberg_bond(double coupling) {
  ComplexMatrix bond(4, 4);
  for (SpinAxis a : {SpinAxis::x, SpinAxis::y, SpinAxis::z})
    bond.add_scaled(Complex(-coupling), linalg::kron(local_spin(a), local_spin(a)));
  return bond;
}

/// H = -J sum_i S_i . S_{i+1}; source sqrt(2 Gamma) S^+ on the first site,
/// drain sqrt(2 Gamma) S^- on the last.
inline LindbladModel<Complex> heisenberg_model(const SpinChainSpec& spec,
                                               const MemoryBudget& budget = {}) {
  const std::size_t length = spec.length;
  const std::size_t d = chain_dimension(length);
  budget.require(linalg::dense_bytes<Complex>(d, d), "Heisenberg chain L=" + std::to_string(length));
  ComplexMatrix h(d, d);
  const ComplexMatrix bond = heisenberg_bond(spec.coupling);
  for (std::size_t i = 0; i + 1 < length; ++i) h += embed(bond, i, length, budget);
  const double amp = std::sqrt(2.0 * spec.gamma);
  ComplexMatrix source = spin_operator(0, SpinAxis::plus, length, budget) * Complex(amp);
  ComplexMatrix drain = spin_operator(length - 1, SpinAxis::minus, length, budget) * Complex(amp);
  return LindbladModel<Complex>(std::move(h), {std::move(source), std::move(drain)}, spec.hbar);
}

/// e^{-beta H} / Tr e^{-beta H}.
inline DensityMatrix<Complex> thermal_state(const ComplexMatrix& hamiltonian, double beta,
                                            const linalg::ExpmConfig& cfg = linalg::ExpmConfig::pade()) {
  if (!(beta >= 0)) throw ContractViolation("thermal_state: beta must be non-negative");
  if (linalg::hermiticity_error(hamiltonian) > master::kHermitianTolerance)
    throw ContractViolation("thermal_state: Hamiltonian is not Hermitian");
  ComplexMatrix w = linalg::expm(hamiltonian * Complex(-beta), cfg);
  const std::size_t d = w.rows();
  ComplexMatrix sym(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) sym(i, j) = 0.5 * (w(i, j) + std::conj(w(j, i)));
  const double z = linalg::trace(sym).real();
  if (!(z > 0) || !std::isfinite(z)) throw NumericalFailure("thermal_state: partition function is not positive");
  sym *= Complex(1.0 / z);
  return DensityMatrix<Complex>(std::move(sym));
}

/// Computational-basis product state; index bit (L-1-site) is 1 for down.
inline PureState basis_product_state(const std::vector<Spin>& pattern) {
  const std::size_t length = pattern.size();
  const std::size_t d = chain_dimension(length);
  std::size_t index = 0;
  for (std::size_t s = 0; s < length; ++s)
    if (pattern[s] == Spin::down) index |= std::size_t{1} << (length - 1 - s);
  PureState psi(d, Complex{});
  psi[index] = 1.0;
  return psi;
}

/// up, down, up, ... of the given length.
inline std::vector<Spin> neel_pattern(std::size_t length) {
  std::vector<Spin> p(length);
  for (std::size_t s = 0; s < length; ++s) p[s] = s % 2 == 0 ? Spin::up : Spin::down;
  return p;
}

inline std::optional<Spin> parse_spin(const std::string& s) {
  if (s == "up") return Spin::up;
  if (s == "down") return Spin::down;
  return std::nullopt;
}

}  // namespace lindex::systems
