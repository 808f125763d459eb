#pragma once

// Subcommand bodies. Each returns the CSV text plus a manifest; writing
// files and mapping errors to exit codes is left to the executable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lindex/cli/config.hpp"
#include "lindex/error.hpp"
#include "lindex/integrators/evolve.hpp"
#include "lindex/master/superoperator.hpp"
#include "lindex/systems/systems.hpp"
#include "lindex/trajectories/mcwf.hpp"
#include "lindex/trajectories/metts.hpp"

namespace lindex::cli {

using linalg::Complex;
using linalg::ComplexMatrix;
using master::DensityMatrix;
using master::LindbladModel;

inline constexpr const char* kRepeatsEnv = "LINDEX_BENCH_MAX_REPEATS";

struct Artifact {
  std::string csv;
  json manifest;
  std::vector<std::string> warnings;
};

/// Full-precision CSV number.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline json make_manifest(const char* command, const json& effective, std::uint64_t seed) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config_hash"] = "fnv1a64:" + hex64(config_hash(effective));
  m["seed"] = seed;
  m["effective_config"] = effective;
  return m;
}

/// Writes `path` and `path.manifest.json`.
inline void write_artifact(const std::string& path, const Artifact& a) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("--out", "cannot write '" + path + "'");
    out << a.csv;
  }
  std::ofstream man(path + ".manifest.json", std::ios::binary);
  if (!man) throw ConfigError("--out", "cannot write '" + path + ".manifest.json'");
  man << a.manifest.dump(2) << "\n";
}

inline LindbladModel<Complex> build_model(const SystemConfig& s, const MemoryBudget& budget) {
  if (s.kind == SystemConfig::Kind::two_level) return systems::two_level_model(s.two_level);
  return systems::heisenberg_model(s.chain, budget);
}

/// Pure initial state; not defined for thermal starts.
inline systems::PureState initial_pure_state(const RunConfig& c) {
  using K = InitialStateConfig::Kind;
  switch (c.initial_state.kind) {
    case K::excited: {
      systems::PureState psi(c.system.dimension(), Complex{});
      psi.back() = 1.0;
      return psi;
    }
    case K::neel: return systems::basis_product_state(systems::neel_pattern(c.system.chain.length));
    case K::pattern: return systems::basis_product_state(c.initial_state.pattern);
    case K::thermal: break;
  }
  throw ContractViolation("initial_pure_state: thermal start has no single pure state");
}

inline DensityMatrix<Complex> initial_density(const RunConfig& c, const LindbladModel<Complex>& model) {
  if (c.initial_state.kind == InitialStateConfig::Kind::thermal)
    return systems::thermal_state(model.hamiltonian(), c.initial_state.beta);
  const auto psi = initial_pure_state(c);
  return DensityMatrix<Complex>::pure(std::span<const Complex>(psi));
}

inline std::vector<Element> effective_elements(const RunConfig& c) {
  if (!c.elements.empty()) return c.elements;
  std::vector<Element> out;
  for (std::size_t k = 0; k < c.system.dimension(); ++k) out.emplace_back(k, k);
  return out;
}

inline std::string element_name(const Element& e) {
  return "rho_" + std::to_string(e.first) + "_" + std::to_string(e.second);
}

/// Integrator spec with the Lindbladian norm filled in where an order is
/// involved, so every Taylor row carries an error bound.
inline integrators::IntegratorSpec with_norm(integrators::IntegratorSpec spec, const LindbladModel<Complex>& model,
                                             const MemoryBudget& budget) {
  if (integrators::uses_order(spec.method) && !spec.lindbladian_norm)
    spec.lindbladian_norm = integrators::estimate_lindbladian_norm(model, budget);
  return spec;
}

namespace detail {

inline bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

inline const integrators::Sample* find_sample(const integrators::Evolution& ev, double t) {
  auto it = std::lower_bound(ev.samples.begin(), ev.samples.end(), t - 1e-9 * std::max(1.0, std::abs(t)),
                             [](const integrators::Sample& s, double v) { return s.t < v; });
  if (it != ev.samples.end() && same_time(it->t, t)) return &*it;
  return nullptr;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

inline Artifact run_evolve(RunConfig cfg) {
  const auto budget = cfg.budget();
  const auto model = build_model(cfg.system, budget);
  cfg.integrator = with_norm(cfg.integrator, model, budget);
  const auto rho0 = initial_density(cfg, model);
  const auto ev = integrators::evolve(model, rho0, cfg.integrator, cfg.t_final, cfg.sample_every, budget);
  const auto elements = effective_elements(cfg);

  std::ostringstream csv;
  csv << "t";
  for (const auto& e : elements) csv << "," << element_name(e) << "_re," << element_name(e) << "_im";
  csv << ",trace,error_bound\n";
  for (const auto& s : ev.samples) {
    const auto& m = s.rho.matrix();
    csv << fmt(s.t);
    for (const auto& [i, j] : elements) csv << "," << fmt(m(i, j).real()) << "," << fmt(m(i, j).imag());
    csv << "," << fmt(linalg::trace(m).real()) << ",";
    csv << (s.report.error_bound ? fmt(*s.report.error_bound) : std::string(s.t == 0 ? "0" : "nan")) << "\n";
  }

  Artifact a;
  a.csv = csv.str();
  a.manifest = make_manifest("evolve", to_json(cfg), cfg.seed);
  a.manifest["rows"] = ev.samples.size();
  a.manifest["steps"] = ev.steps;
  a.manifest["apply_count"] = ev.apply_count;
  if (ev.order_used) a.manifest["order_used"] = ev.order_used;
  if (!ev.order_target_reached) a.warnings.push_back("error target not reached at max_order");
  return a;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

inline Artifact run_compare(CompareConfig cfg) {
  const auto budget = cfg.a.budget();
  const auto model = build_model(cfg.a.system, budget);
  const auto rho0 = initial_density(cfg.a, model);
  const auto ev_a = integrators::evolve(model, rho0, cfg.a.integrator, cfg.a.t_final, cfg.a.sample_every, budget);
  const auto ev_b = integrators::evolve(model, rho0, cfg.b.integrator, cfg.b.t_final, cfg.b.sample_every, budget);
  const auto ev_ref = integrators::evolve(model, rho0, cfg.reference, cfg.a.t_final, 1, budget);

  std::ostringstream csv;
  csv << "t,method_a_dev,method_b_dev\n";
  std::size_t rows = 0;
  for (const auto& sa : ev_a.samples) {
    const auto* sb = detail::find_sample(ev_b, sa.t);
    if (!sb) continue;
    const auto* sr = detail::find_sample(ev_ref, sa.t);
    if (!sr)
      throw ConfigError("reference.dt", "reference has no sample at t=" + fmt(sa.t) +
                                            "; choose a step that divides the sample times");
    csv << fmt(sa.t) << "," << fmt(linalg::max_abs_diff(sa.rho.matrix(), sr->rho.matrix())) << ","
        << fmt(linalg::max_abs_diff(sb->rho.matrix(), sr->rho.matrix())) << "\n";
    ++rows;
  }
  if (rows == 0) throw ConfigError("b.sample_every", "a and b share no sample times");

  Artifact a;
  a.csv = csv.str();
  a.manifest = make_manifest("compare", to_json(cfg), cfg.a.seed);
  a.manifest["rows"] = rows;
  a.manifest["apply_count"] = {{"a", ev_a.apply_count}, {"b", ev_b.apply_count}, {"reference", ev_ref.apply_count}};
  return a;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchRecord {
  integrators::Method method;
  std::size_t sites = 0;
  std::size_t dimension = 0;
  std::optional<double> seconds_per_step;
  std::size_t apply_count = 0;
  std::uint64_t peak_bytes_estimate = 0;
  std::string status;  // "ok", or the refusal / skip reason
};

/// Rough peak working set of one step, in bytes.
inline std::uint64_t peak_bytes_estimate(integrators::Method m, std::size_t d, std::size_t jumps) {
  const std::uint64_t mat = linalg::dense_bytes<Complex>(d, d);
  const std::uint64_t model = (3 + 3 * jumps) * mat;
  const std::uint64_t superop = master::superoperator_bytes<Complex>(d);
  auto sat_add = [](std::uint64_t a, std::uint64_t b) { return a > UINT64_MAX - b ? UINT64_MAX : a + b; };
  auto sat_mul = [](std::uint64_t a, std::uint64_t k) { return k != 0 && a > UINT64_MAX / k ? UINT64_MAX : a * k; };
  switch (m) {
    case integrators::Method::taylor_series: return model + 5 * mat;
    case integrators::Method::rk4: return model + 9 * mat;
    case integrators::Method::vectorization_taylor: return sat_add(sat_add(superop, model), 4 * mat);
    case integrators::Method::vectorization_full: return sat_add(sat_mul(superop, 7), model);
  }
  return 0;
}

inline std::size_t effective_repeats(std::size_t configured) {
  if (const char* cap = std::getenv(kRepeatsEnv)) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(cap, &end, 10);
    if (end != cap && *end == '\0' && v >= 1) return std::min<std::size_t>(configured, v);
  }
  return configured;
}

/// Times one step of `method` on the Neel-initialized chain of length L.
inline BenchRecord bench_cell(const BenchConfig& cfg, integrators::Method method, std::size_t length,
                              std::size_t repeats) {
  using integrators::Method;
  BenchRecord rec{method, length, systems::chain_dimension(length), std::nullopt, 0, 0, "ok"};
  const std::size_t d = rec.dimension;
  const MemoryBudget budget{cfg.memory_budget_bytes};
  rec.peak_bytes_estimate = peak_bytes_estimate(method, d, 2);
  if (integrators::uses_superoperator(method)) {
    const auto need = master::superoperator_bytes<Complex>(d);
    if (!budget.allows(need)) {
      rec.status = "refused: superoperator needs " + std::to_string(need) + " bytes > budget " +
                   std::to_string(budget.bytes);
      return rec;
    }
  }
  for (const auto& [m, limit] : cfg.run_limits)
    if (m == method && length > limit) {
      rec.status = "skipped: above run limit L=" + std::to_string(limit);
      return rec;
    }

  std::optional<LindbladModel<Complex>> built;
  try {
    built.emplace(systems::heisenberg_model({length, cfg.coupling, cfg.gamma, cfg.hbar}, budget));
  } catch (const MemoryBudgetExceeded& e) {
    std::string reason = e.what();
    std::replace(reason.begin(), reason.end(), ',', ';');
    rec.status = "refused: " + reason;
    return rec;
  }
  const auto& model = *built;
  const auto psi = systems::basis_product_state(systems::neel_pattern(length));
  const auto rho0 = DensityMatrix<Complex>::pure(std::span<const Complex>(psi));

  std::optional<ComplexMatrix> superop;
  std::optional<master::VectorizedState<Complex>> vec0;
  if (integrators::uses_superoperator(method)) {
    superop = master::build_superoperator(model, budget);
    vec0 = master::vectorize(rho0.matrix());
  }
  master::CountingGenerator<LindbladModel<Complex>> gen(model);
  std::size_t applies = 0;
  auto one_step = [&] {
    switch (method) {
      case Method::taylor_series: {
        gen.reset();
        auto r = integrators::taylor_series(gen, rho0.matrix(), cfg.dt, cfg.order);
        applies = gen.count();
        return linalg::all_finite(r);
      }
      case Method::rk4: {
        gen.reset();
        auto r = integrators::rk4(gen, rho0.matrix(), cfg.dt);
        applies = gen.count();
        return linalg::all_finite(r);
      }
      case Method::vectorization_taylor: {
        auto r = integrators::vec_taylor_step(*superop, *vec0, cfg.dt, cfg.order);
        applies = cfg.order;
        return std::isfinite(std::abs(r.vec.front()));
      }
      case Method::vectorization_full: {
        auto r = integrators::vec_full_step(*superop, *vec0, cfg.dt);
        applies = 1;
        return std::isfinite(std::abs(r.vec.front()));
      }
    }
    return false;
  };

  if (!one_step()) throw NumericalFailure("bench: warm-up step produced non-finite entries");
  std::vector<double> times;
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const bool ok = one_step();
    const auto t1 = std::chrono::steady_clock::now();
    if (!ok) throw NumericalFailure("bench: step produced non-finite entries");
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  rec.seconds_per_step = n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
  rec.apply_count = applies;
  return rec;
}

inline std::string bench_csv_header() {
  return "method,sites,dimension,seconds_per_step,apply_count,peak_bytes_estimate,status\n";
}

inline std::string bench_csv_row(const BenchRecord& r) {
  std::ostringstream s;
  s << integrators::to_string(r.method) << "," << r.sites << "," << r.dimension << ","
    << (r.seconds_per_step ? fmt(*r.seconds_per_step) : std::string()) << "," << r.apply_count << ","
    << r.peak_bytes_estimate << "," << r.status << "\n";
  return s.str();
}

/// Cells run strictly one after another.
inline std::vector<BenchRecord> bench_sweep(const BenchConfig& cfg) {
  const std::size_t repeats = effective_repeats(cfg.repeats);
  std::vector<BenchRecord> out;
  for (std::size_t length = cfg.min_sites; length <= cfg.max_sites; ++length)
    for (auto method : cfg.methods) out.push_back(bench_cell(cfg, method, length, repeats));
  return out;
}

inline Artifact run_bench(const BenchConfig& cfg) {
  const auto records = bench_sweep(cfg);
  Artifact a;
  a.csv = bench_csv_header();
  for (const auto& r : records) a.csv += bench_csv_row(r);
  a.manifest = make_manifest("bench", to_json(cfg), cfg.seed);
  a.manifest["rows"] = records.size();
  a.manifest["repeats_used"] = effective_repeats(cfg.repeats);
  return a;
}

// ---------------------------------------------------------------------------
// traj
// ---------------------------------------------------------------------------

inline trajectories::MettsConfig effective_metts(const RunConfig& cfg, std::size_t n_samples, double beta) {
  trajectories::MettsConfig m = cfg.metts.value_or(trajectories::MettsConfig{});
  m.beta = beta;
  m.n_samples = n_samples;
  m.master_seed = cfg.seed;
  return m;
}

inline Artifact run_traj(RunConfig cfg) {
  if (!cfg.trajectory) throw ConfigError("trajectory", "missing required section");
  const auto elements = effective_elements(cfg);
  for (std::size_t k = 0; k < elements.size(); ++k)
    if (elements[k].first != elements[k].second)
      throw ConfigError("elements[" + std::to_string(k) + "]", "traj reports diagonal elements only");

  const auto budget = cfg.budget();
  const auto model = build_model(cfg.system, budget);
  auto tcfg = *cfg.trajectory;
  tcfg.master_seed = cfg.seed;

  std::vector<systems::PureState> initial;
  if (cfg.initial_state.kind == InitialStateConfig::Kind::thermal) {
    const auto m = effective_metts(cfg, tcfg.n_trajectories, cfg.initial_state.beta);
    initial = trajectories::metts_sample(model.hamiltonian(), m);
  } else {
    initial.push_back(initial_pure_state(cfg));
  }
  const auto rho0 = initial_density(cfg, model);
  const auto ens = trajectories::run_ensemble(model, initial, tcfg, cfg.t_final);
  const auto ref = integrators::evolve(model, rho0, cfg.integrator, cfg.t_final, 1, budget);

  std::ostringstream csv;
  csv << "t,element,mcwf_value,reference_value,stderr_estimate\n";
  for (std::size_t s = 0; s < ens.times.size(); ++s) {
    const double t = ens.times[s];
    const auto* r = detail::find_sample(ref, t);
    if (!r)
      throw ConfigError("integrator.dt", "reference has no sample at t=" + fmt(t) +
                                             "; choose a step that divides the trajectory sample times");
    const auto states = ens.states_at(s);
    const auto est = trajectories::diagonal_estimate(states);
    for (const auto& [i, j] : elements)
      csv << fmt(t) << "," << element_name({i, j}) << "," << fmt(est.mean[i]) << ","
          << fmt(r->rho.matrix()(i, i).real()) << "," << fmt(est.stderr_estimate[i]) << "\n";
  }

  Artifact a;
  a.csv = csv.str();
  a.manifest = make_manifest("traj", to_json(cfg), cfg.seed);
  a.manifest["rows"] = ens.times.size() * elements.size();
  a.manifest["max_jump_probability"] = ens.max_jump_probability;
  if (ens.max_jump_probability > trajectories::kWarnJumpProbability)
    a.warnings.push_back("max per-step jump probability " + fmt(ens.max_jump_probability) +
                         " exceeds 0.1; the first-order scheme may be biased, consider a smaller dt");
  return a;
}

// ---------------------------------------------------------------------------
// metts
// ---------------------------------------------------------------------------

inline Artifact run_metts(RunConfig cfg) {
  const auto budget = cfg.budget();
  const auto model = build_model(cfg.system, budget);
  trajectories::MettsConfig m = cfg.metts.value_or(trajectories::MettsConfig{});
  m.master_seed = cfg.seed;
  const auto samples = trajectories::metts_sample(model.hamiltonian(), m);
  const auto thermal = systems::thermal_state(model.hamiltonian(), m.beta);
  const auto est = trajectories::diagonal_estimate(samples);
  const auto elements = effective_elements(cfg);
  for (std::size_t k = 0; k < elements.size(); ++k)
    if (elements[k].first != elements[k].second)
      throw ConfigError("elements[" + std::to_string(k) + "]", "metts reports diagonal elements only");

  std::ostringstream csv;
  csv << "element,metts_value,thermal_value,stderr_estimate\n";
  for (const auto& [i, j] : elements)
    csv << element_name({i, j}) << "," << fmt(est.mean[i]) << "," << fmt(thermal.matrix()(i, i).real()) << ","
        << fmt(est.stderr_estimate[i]) << "\n";
  cfg.metts = m;
  Artifact a;
  a.csv = csv.str();
  a.manifest = make_manifest("metts", to_json(cfg), cfg.seed);
  a.manifest["rows"] = elements.size();
  return a;
}

}  // namespace lindex::cli
