#pragma once

// Quantum-jump (Monte Carlo wave function) unraveling with a fixed time step.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "lindex/error.hpp"
#include "lindex/integrators/evolve.hpp"
#include "lindex/linalg/matrix.hpp"
#include "lindex/master/model.hpp"
#include "lindex/random.hpp"
#include "lindex/systems/systems.hpp"

namespace lindex::trajectories {

using linalg::Complex;
using linalg::ComplexMatrix;
using master::DensityMatrix;
using master::LindbladModel;
using systems::PureState;

inline constexpr double kMaxJumpProbability = 0.5;
inline constexpr double kWarnJumpProbability = 0.1;

struct TrajectoryConfig {
  double dt = 0.1;
  std::size_t n_trajectories = 1000;
  std::uint64_t master_seed = 1;
  unsigned taylor_order = 10;  // order of the no-jump propagator
  std::size_t sample_every = 1;
  unsigned threads = 1;

  void validate() const {
    if (!(dt > 0)) throw ContractViolation("TrajectoryConfig: dt must be > 0");
    if (n_trajectories < 1) throw ContractViolation("TrajectoryConfig: n_trajectories must be >= 1");
    if (sample_every < 1) throw ContractViolation("TrajectoryConfig: sample_every must be >= 1");
  }
};

inline double state_norm(std::span<const Complex> psi) {
  double s = 0.0;
  for (const auto& v : psi) s += std::norm(v);
  return std::sqrt(s);
}

/// H - (i hbar / 2) sum_i L_i^dagger L_i
inline ComplexMatrix effective_hamiltonian(const LindbladModel<Complex>& model) {
  ComplexMatrix h = model.hamiltonian();
  const Complex factor(0.0, -0.5 * model.hbar());
  for (std::size_t i = 0; i < model.jump_ops().size(); ++i) h.add_scaled(factor, model.jump_product(i));
  return h;
}

struct Propagated {
  PureState state;       // renormalized
  double survival_norm;  // norm before renormalization
};

/// Applies sum_{k<=n} (-i dt / hbar)^k H_eff^k / k! and renormalizes.
inline Propagated nh_propagate(const ComplexMatrix& h_eff, std::span<const Complex> psi, double dt,
                               unsigned n, double hbar = 1.0) {
  if (!(dt >= 0)) throw ContractViolation("nh_propagate: dt must be non-negative");
  if (h_eff.cols() != psi.size())
    throw ContractViolation("nh_propagate: state length does not match H_eff");
  PureState sum(psi.begin(), psi.end());
  if (dt > 0) {
    PureState term = sum;
    for (unsigned k = 1; k <= n; ++k) {
      term = linalg::matvec(h_eff, std::span<const Complex>(term));
      const Complex c(0.0, -dt / (hbar * static_cast<double>(k)));
      for (auto& v : term) v *= c;
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += term[i];
    }
  }
  const double norm = state_norm(sum);
  if (!(norm >= 1e-14) || !std::isfinite(norm))
    throw DegenerateState("nh_propagate: survival norm " + std::to_string(norm) +
                          " collapsed; reduce dt");
  for (auto& v : sum) v /= norm;
  return {std::move(sum), norm};
}

struct JumpRecord {
  std::size_t step;  // 1-based step in which the jump happened
  double t;          // end time of that step
  std::size_t channel;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PureState> states;
  std::vector<JumpRecord> jumps;
  double max_jump_probability = 0.0;
};

/// Precomputed pieces shared by every trajectory of one model.
class JumpUnraveling {
 public:
  explicit JumpUnraveling(const LindbladModel<Complex>& model)
      : model_(&model), h_eff_(trajectories::effective_hamiltonian(model)) {}

  [[nodiscard]] const ComplexMatrix& effective_hamiltonian() const noexcept { return h_eff_; }
  [[nodiscard]] const LindbladModel<Complex>& model() const noexcept { return *model_; }

  /// One trajectory; deterministic in (cfg.master_seed, stream_id).
  Trajectory run(std::span<const Complex> psi0, const TrajectoryConfig& cfg, double t_final,
                 std::uint64_t stream_id) const {
    cfg.validate();
    const auto& model = *model_;
    const std::size_t d = model.dimension();
    if (psi0.size() != d) throw ContractViolation("mcwf_trajectory: state length does not match model");
    if (std::abs(state_norm(psi0) - 1.0) > 1e-10)
      throw ContractViolation("mcwf_trajectory: initial state is not normalized");
    if (!(t_final >= 0)) throw ContractViolation("mcwf_trajectory: t_final must be non-negative");

    StreamRng rng(cfg.master_seed, stream_id);
    Trajectory out;
    PureState psi(psi0.begin(), psi0.end());
    out.times.push_back(0.0);
    out.states.push_back(psi);

    const auto [full_steps, partial] = integrators::step_plan(t_final, cfg.dt);
    const std::size_t total_steps = full_steps + (partial > 0 ? 1 : 0);
    const std::size_t channels = model.jump_ops().size();
    std::vector<double> dp(channels);

    for (std::size_t k = 1; k <= total_steps; ++k) {
      const double h = k <= full_steps ? cfg.dt : partial;
      double total = 0.0;
      for (std::size_t c = 0; c < channels; ++c) {
        const auto lpsi = linalg::matvec(model.jump_product(c), std::span<const Complex>(psi));
        Complex expect{};
        for (std::size_t i = 0; i < d; ++i) expect += std::conj(psi[i]) * lpsi[i];
        dp[c] = h * std::max(0.0, expect.real());
        total += dp[c];
      }
      out.max_jump_probability = std::max(out.max_jump_probability, total);
      if (total >= kMaxJumpProbability)
        throw StepSizeError("mcwf_trajectory: step " + std::to_string(k) +
                            " has total jump probability " + std::to_string(total) +
                            " >= 0.5; reduce dt");
      const double r = rng.uniform();
      if (r < total) {
        std::size_t channel = 0;
        double cum = dp[0];
        while (channel + 1 < channels && r >= cum) cum += dp[++channel];
        auto jumped = linalg::matvec(model.jump_ops()[channel], std::span<const Complex>(psi));
        const double norm = state_norm(jumped);
        if (!(norm > 0)) throw DegenerateState("mcwf_trajectory: jump produced a null state");
        for (auto& v : jumped) v /= norm;
        psi = std::move(jumped);
        const double t = k <= full_steps ? static_cast<double>(k) * cfg.dt : t_final;
        out.jumps.push_back({k, t, channel});
      } else {
        psi = nh_propagate(h_eff_, psi, h, cfg.taylor_order, model.hbar()).state;
      }
      const bool on_grid = k <= full_steps && k % cfg.sample_every == 0;
      if (on_grid || k == total_steps) {
        const double t = k <= full_steps ? static_cast<double>(k) * cfg.dt : t_final;
        if (out.times.back() != t) {
          out.times.push_back(t);
          out.states.push_back(psi);
        }
      }
    }
    return out;
  }

 private:
  const LindbladModel<Complex>* model_;
  ComplexMatrix h_eff_;
};

inline Trajectory mcwf_trajectory(const LindbladModel<Complex>& model, std::span<const Complex> psi0,
                                  const TrajectoryConfig& cfg, double t_final, std::uint64_t stream_id) {
  return JumpUnraveling(model).run(psi0, cfg, t_final, stream_id);
}

struct Ensemble {
  std::vector<double> times;
  std::vector<Trajectory> trajectories;  // index i used stream id i
  double max_jump_probability = 0.0;

  /// States of every trajectory at sample index s.
  [[nodiscard]] std::vector<PureState> states_at(std::size_t s) const {
    std::vector<PureState> out;
    out.reserve(trajectories.size());
    for (const auto& tr : trajectories) out.push_back(tr.states.at(s));
    return out;
  }
};

/// Runs cfg.n_trajectories trajectories; trajectory i starts from
/// initial[i % initial.size()] and uses stream id i. Results are merged by
/// index, so the ensemble does not depend on cfg.threads.
inline Ensemble run_ensemble(const LindbladModel<Complex>& model, const std::vector<PureState>& initial,
                             const TrajectoryConfig& cfg, double t_final) {
  cfg.validate();
  if (initial.empty()) throw ContractViolation("run_ensemble: no initial states");
  const JumpUnraveling unraveling(model);
  Ensemble ens;
  ens.trajectories.resize(cfg.n_trajectories);
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.n_trajectories)));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<bool> stop{false};
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < cfg.n_trajectories && !stop.load(); i += workers) {
      try {
        ens.trajectories[i] = unraveling.run(initial[i % initial.size()], cfg, t_final, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  ens.times = ens.trajectories.front().times;
  for (const auto& tr : ens.trajectories)
    ens.max_jump_probability = std::max(ens.max_jump_probability, tr.max_jump_probability);
  return ens;
}

/// (1/N) sum_i |psi_i><psi_i|
inline DensityMatrix<Complex> ensemble_density(std::span<const PureState> states) {
  if (states.empty()) throw ContractViolation("ensemble_density: empty state list");
  const std::size_t d = states.front().size();
  ComplexMatrix rho(d, d);
  for (const auto& psi : states) {
    if (psi.size() != d) throw ContractViolation("ensemble_density: states have different dimensions");
    for (std::size_t i = 0; i < d; ++i) {
      const Complex pi = psi[i];
      for (std::size_t j = 0; j < d; ++j) rho(i, j) += pi * std::conj(psi[j]);
    }
  }
  rho *= Complex(1.0 / static_cast<double>(states.size()));
  return DensityMatrix<Complex>::unchecked(std::move(rho));
}

struct DiagonalEstimate {
  std::vector<double> mean;
  std::vector<double> stderr_estimate;  // sample standard deviation / sqrt(N)
};

/// Mean and standard error of the populations |<k|psi_i>|^2 over the ensemble.
inline DiagonalEstimate diagonal_estimate(std::span<const PureState> states) {
  if (states.empty()) throw ContractViolation("diagonal_estimate: empty state list");
  const std::size_t d = states.front().size();
  const auto n = static_cast<double>(states.size());
  DiagonalEstimate est{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (const auto& psi : states)
    for (std::size_t k = 0; k < d; ++k) est.mean[k] += std::norm(psi[k]);
  for (auto& m : est.mean) m /= n;
  if (states.size() > 1) {
    std::vector<double> var(d, 0.0);
    for (const auto& psi : states)
      for (std::size_t k = 0; k < d; ++k) {
        const double dev = std::norm(psi[k]) - est.mean[k];
        var[k] += dev * dev;
      }
    for (std::size_t k = 0; k < d; ++k) est.stderr_estimate[k] = std::sqrt(var[k] / (n - 1.0) / n);
  }
  return est;
}

}  // namespace lindex::trajectories
