#pragma once

// Minimally entangled typical thermal states for spin-1/2 chains, with
// dense imaginary-time evolution.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lindex/error.hpp"
#include "lindex/linalg/expm.hpp"
#include "lindex/linalg/matrix.hpp"
#include "lindex/random.hpp"
#include "lindex/trajectories/mcwf.hpp"

namespace lindex::trajectories {

enum class CollapseBasis { x, y, z };

inline std::optional<CollapseBasis> parse_basis(const std::string& s) {
  if (s == "x") return CollapseBasis::x;
  if (s == "y") return CollapseBasis::y;
  if (s == "z") return CollapseBasis::z;
  return std::nullopt;
}

inline const char* to_string(CollapseBasis b) {
  switch (b) {
    case CollapseBasis::x: return "x";
    case CollapseBasis::y: return "y";
    case CollapseBasis::z: return "z";
  }
  return "?";
}

/// Stream id of the METTS chain; trajectory streams use ids 0..N-1.
inline constexpr std::uint64_t kMettsStream = 0x4d45545453000000ull;

struct MettsConfig {
  double beta = 1.0;
  std::size_t n_samples = 1000;
  std::size_t burn_in = 10;
  std::uint64_t master_seed = 1;
  CollapseBasis basis = CollapseBasis::x;
  // Odd chain steps collapse in a second basis (z, or x when basis is z).
  // A Hamiltonian that conserves total spin along the collapse axis would
  // otherwise trap a single-basis chain in its starting magnetization sector.
  bool alternate = true;

  void validate() const {
    if (!(beta >= 0)) throw ContractViolation("MettsConfig: beta must be non-negative");
    if (n_samples < 1) throw ContractViolation("MettsConfig: n_samples must be >= 1");
  }
};

/// Single-site basis vectors |+b>, |-b> of the collapse basis.
inline std::array<std::array<Complex, 2>, 2> collapse_vectors(CollapseBasis b) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (b) {
    case CollapseBasis::x: return {{{r, r}, {r, -r}}};
    case CollapseBasis::y: return {{{r, Complex(0, r)}, {r, Complex(0, -r)}}};
    case CollapseBasis::z: return {{{1.0, 0.0}, {0.0, 1.0}}};
  }
  throw ContractViolation("collapse_vectors: unknown basis");
}

inline std::size_t chain_length_of(std::size_t d) {
  std::size_t length = 0;
  while ((std::size_t{1} << length) < d) ++length;
  if ((std::size_t{1} << length) != d || length == 0)
    throw ContractViolation("METTS: dimension " + std::to_string(d) + " is not 2^L with L >= 1");
  return length;
}

struct CollapseOutcome {
  PureState product_state;
  std::vector<double> probability_sums;  // per site: p(+) + p(-), should be 1
};

/// Measures every site left to right in `basis` with Born probabilities.
/// psi must be normalized; the result is a normalized product state.
inline CollapseOutcome collapse_product_state(const PureState& psi, CollapseBasis basis, StreamRng& rng) {
  const std::size_t d = psi.size();
  const std::size_t length = chain_length_of(d);
  const auto e = collapse_vectors(basis);
  PureState cur = psi;
  CollapseOutcome out;
  out.probability_sums.reserve(length);
  for (std::size_t site = 0; site < length; ++site) {
    const std::size_t stride = std::size_t{1} << (length - 1 - site);
    // amplitude of outcome o on the rest: conj(e_o[0]) psi[bit=0] + conj(e_o[1]) psi[bit=1]
    double p[2] = {0.0, 0.0};
    for (int o = 0; o < 2; ++o)
      for (std::size_t idx = 0; idx < d; ++idx) {
        if (idx & stride) continue;
        const Complex a = std::conj(e[o][0]) * cur[idx] + std::conj(e[o][1]) * cur[idx | stride];
        p[o] += std::norm(a);
      }
    out.probability_sums.push_back(p[0] + p[1]);
    const int o = rng.uniform() * (p[0] + p[1]) < p[0] ? 0 : 1;
    if (!(p[o] > 0)) throw DegenerateState("METTS collapse: zero-probability outcome");
    const double scale = 1.0 / std::sqrt(p[o]);
    for (std::size_t idx = 0; idx < d; ++idx) {
      if (idx & stride) continue;
      const Complex a = (std::conj(e[o][0]) * cur[idx] + std::conj(e[o][1]) * cur[idx | stride]) * scale;
      cur[idx] = e[o][0] * a;
      cur[idx | stride] = e[o][1] * a;
    }
  }
  out.product_state = std::move(cur);
  return out;
}

/// Random product state in the collapse basis.
inline PureState random_product_state(std::size_t length, CollapseBasis basis, StreamRng& rng) {
  const auto e = collapse_vectors(basis);
  PureState psi{1.0};
  for (std::size_t site = 0; site < length; ++site) {
    const auto& v = e[rng.uniform() < 0.5 ? 0 : 1];
    PureState next(psi.size() * 2);
    for (std::size_t i = 0; i < psi.size(); ++i) {
      next[2 * i] = psi[i] * v[0];
      next[2 * i + 1] = psi[i] * v[1];
    }
    psi = std::move(next);
  }
  return psi;
}

inline CollapseBasis complementary_basis(CollapseBasis b) {
  return b == CollapseBasis::z ? CollapseBasis::x : CollapseBasis::z;
}

/// Markov chain of METTS |psi> = e^{-beta H/2}|phi> / sqrt(<phi|e^{-beta H}|phi>),
/// collapsing each metts into the next product state |phi>. The first
/// burn_in samples are discarded.
inline std::vector<PureState> metts_sample(const ComplexMatrix& hamiltonian, const MettsConfig& cfg) {
  cfg.validate();
  if (linalg::hermiticity_error(hamiltonian) > master::kHermitianTolerance)
    throw ContractViolation("metts_sample: Hamiltonian is not Hermitian");
  const std::size_t length = chain_length_of(hamiltonian.rows());
  const ComplexMatrix half_boltzmann = linalg::expm(hamiltonian * Complex(-0.5 * cfg.beta));
  StreamRng rng(cfg.master_seed, kMettsStream);
  PureState phi = random_product_state(length, cfg.basis, rng);
  std::vector<PureState> samples;
  samples.reserve(cfg.n_samples);
  for (std::size_t it = 0; it < cfg.burn_in + cfg.n_samples; ++it) {
    PureState psi = linalg::matvec(half_boltzmann, std::span<const Complex>(phi));
    const double weight = state_norm(psi);  // sqrt(P(phi))
    if (!(weight * weight > 1e-300) || !std::isfinite(weight))
      throw DegenerateState("metts_sample: norm of e^{-beta H/2}|phi> underflowed");
    for (auto& v : psi) v /= weight;
    const CollapseBasis b = cfg.alternate && it % 2 == 1 ? complementary_basis(cfg.basis) : cfg.basis;
    phi = collapse_product_state(psi, b, rng).product_state;
    if (it >= cfg.burn_in) samples.push_back(std::move(psi));
  }
  return samples;
}

}  // namespace lindex::trajectories
