#pragma once

// JSON run configuration with strict key checking.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lindex/error.hpp"
#include "lindex/integrators/evolve.hpp"
#include "lindex/linalg/expm.hpp"
#include "lindex/systems/systems.hpp"
#include "lindex/trajectories/mcwf.hpp"
#include "lindex/trajectories/metts.hpp"

namespace lindex::cli {

using json = nlohmann::ordered_json;

/// Malformed or inconsistent configuration. `field` is the dotted path of
/// the offending key, or "line L column C" for syntax errors.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

inline constexpr const char* kVersion = "0.1.0";

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

/// Reads keys of one JSON object and rejects any key it was not asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_, "expected an object");
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_->contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_->contains(key)) throw ConfigError(join_path(path_, key), "missing required key");
    return (*j_)[key];
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    return j_->contains(key) ? &(*j_)[key] : nullptr;
  }

  double real(const std::string& key) { return as_real(at(key), key); }
  double real(const std::string& key, double fallback) {
    const json* v = find(key);
    return v ? as_real(*v, key) : fallback;
  }
  std::optional<double> optional_real(const std::string& key) {
    const json* v = find(key);
    if (!v || v->is_null()) return std::nullopt;
    return as_real(*v, key);
  }

  std::uint64_t count(const std::string& key) { return as_count(at(key), key); }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    return v ? as_count(*v, key) : fallback;
  }
  std::optional<std::uint64_t> optional_count(const std::string& key) {
    const json* v = find(key);
    if (!v || v->is_null()) return std::nullopt;
    return as_count(*v, key);
  }

  std::string text(const std::string& key) { return as_text(at(key), key); }
  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    return v ? as_text(*v, key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(join_path(path_, key), "expected true or false");
    return v->get<bool>();
  }

  [[nodiscard]] std::string path(const std::string& key) const { return join_path(path_, key); }

  void finish() const {
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(join_path(path_, it.key()), "unknown key");
  }

 private:
  double as_real(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ConfigError(join_path(path_, key), "expected a number");
    return v.get<double>();
  }
  std::uint64_t as_count(const json& v, const std::string& key) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(join_path(path_, key), "expected a non-negative integer");
  }
  std::string as_text(const json& v, const std::string& key) const {
    if (!v.is_string()) throw ConfigError(join_path(path_, key), "expected a string");
    return v.get<std::string>();
  }

  const json* j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Sections
// ---------------------------------------------------------------------------

struct SystemConfig {
  enum class Kind { two_level, heisenberg };
  Kind kind = Kind::two_level;
  systems::TwoLevelSpec two_level{};
  systems::SpinChainSpec chain{};

  [[nodiscard]] std::size_t dimension() const {
    return kind == Kind::two_level ? 2 : systems::chain_dimension(chain.length);
  }
  friend bool operator==(const SystemConfig& a, const SystemConfig& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Kind::two_level)
      return a.two_level.energy == b.two_level.energy && a.two_level.rabi == b.two_level.rabi &&
             a.two_level.gamma == b.two_level.gamma && a.two_level.hbar == b.two_level.hbar;
    return a.chain.length == b.chain.length && a.chain.coupling == b.chain.coupling &&
           a.chain.gamma == b.chain.gamma && a.chain.hbar == b.chain.hbar;
  }
};

struct InitialStateConfig {
  enum class Kind { excited, thermal, neel, pattern };
  Kind kind = Kind::excited;
  double beta = 1.0;
  std::vector<systems::Spin> pattern;
};

using Element = std::pair<std::size_t, std::size_t>;

struct RunConfig {
  SystemConfig system;
  integrators::IntegratorSpec integrator;
  double t_final = 1.0;
  std::size_t sample_every = 1;
  InitialStateConfig initial_state;
  std::uint64_t memory_budget_bytes = kDefaultMemoryBudget;
  std::uint64_t seed = 1;
  std::string output_path;
  std::vector<Element> elements;  // empty: every diagonal element
  std::optional<trajectories::TrajectoryConfig> trajectory;
  std::optional<trajectories::MettsConfig> metts;

  [[nodiscard]] MemoryBudget budget() const { return {memory_budget_bytes}; }
};

struct CompareConfig {
  RunConfig a;
  RunConfig b;
  integrators::IntegratorSpec reference;
};

struct BenchConfig {
  std::vector<integrators::Method> methods;
  std::size_t min_sites = 1;
  std::size_t max_sites = 4;
  std::size_t repeats = 3;
  double dt = 0.1;
  unsigned order = 10;
  double coupling = 1.0;
  double gamma = 1.0;
  double hbar = 1.0;
  std::uint64_t memory_budget_bytes = kDefaultMemoryBudget;
  // Largest L at which a method is timed; admissible cells above it are
  // reported as skipped. Absent means no limit.
  std::vector<std::pair<integrators::Method, std::size_t>> run_limits;
  std::uint64_t seed = 1;
  std::string output_path;
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline SystemConfig parse_system(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SystemConfig s;
  const std::string type = r.text("type");
  if (type == "two_level") {
    s.kind = SystemConfig::Kind::two_level;
    s.two_level.energy = r.real("energy", 1.0);
    s.two_level.rabi = r.real("rabi", 1.0);
    s.two_level.gamma = r.real("gamma", 0.5);
    s.two_level.hbar = r.real("hbar", 1.0);
    if (s.two_level.gamma < 0) throw ConfigError(r.path("gamma"), "must be non-negative");
    if (!(s.two_level.hbar > 0)) throw ConfigError(r.path("hbar"), "must be positive");
  } else if (type == "heisenberg") {
    s.kind = SystemConfig::Kind::heisenberg;
    s.chain.length = r.count("length");
    s.chain.coupling = r.real("coupling", 1.0);
    s.chain.gamma = r.real("gamma", 1.0);
    s.chain.hbar = r.real("hbar", 1.0);
    if (s.chain.length < 1 || s.chain.length > 16)
      throw ConfigError(r.path("length"), "must be in [1, 16]");
    if (s.chain.gamma < 0) throw ConfigError(r.path("gamma"), "must be non-negative");
    if (!(s.chain.hbar > 0)) throw ConfigError(r.path("hbar"), "must be positive");
  } else {
    throw ConfigError(r.path("type"), "unknown system type '" + type + "' (two_level, heisenberg)");
  }
  r.finish();
  return s;
}

inline linalg::ExpmConfig parse_expm(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  linalg::ExpmConfig c;
  const std::string method = r.text("method", "pade_ss");
  if (method == "pade_ss") {
    c = linalg::ExpmConfig::pade(static_cast<unsigned>(r.count("order", linalg::kDefaultPadeDegree)));
  } else if (method == "taylor_ss") {
    c = linalg::ExpmConfig::taylor(static_cast<unsigned>(r.count("order", linalg::kDefaultTaylorOrder)));
  } else {
    throw ConfigError(r.path("method"), "unknown expm method '" + method + "' (pade_ss, taylor_ss)");
  }
  if (c.order < 1) throw ConfigError(r.path("order"), "must be >= 1");
  if (auto s = r.optional_count("scaling")) c.scaling = static_cast<unsigned>(*s);
  r.finish();
  return c;
}

inline integrators::IntegratorSpec parse_integrator(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  integrators::IntegratorSpec s;
  const std::string method = r.text("method");
  auto m = integrators::parse_method(method);
  if (!m)
    throw ConfigError(r.path("method"), "unknown method '" + method +
                                            "' (taylor_series, vectorization_full, "
                                            "vectorization_taylor, rk4)");
  s.method = *m;
  s.dt = r.real("dt");
  if (!(s.dt > 0)) throw ConfigError(r.path("dt"), "must be positive");
  s.order = static_cast<unsigned>(r.count("order", 10));
  s.error_target = r.optional_real("error_target");
  s.lindbladian_norm = r.optional_real("lindbladian_norm");
  s.max_order = static_cast<unsigned>(r.count("max_order", integrators::kDefaultMaxOrder));
  if (const json* e = r.find("expm")) s.expm = parse_expm(*e, r.path("expm"));
  if (integrators::uses_order(s.method) && !s.error_target && s.order < 1)
    throw ConfigError(r.path("order"), "must be >= 1");
  if (s.error_target && !(*s.error_target > 0))
    throw ConfigError(r.path("error_target"), "must be positive");
  if (s.lindbladian_norm && !(*s.lindbladian_norm >= 0))
    throw ConfigError(r.path("lindbladian_norm"), "must be non-negative");
  r.finish();
  return s;
}

inline InitialStateConfig parse_initial_state(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  InitialStateConfig s;
  const std::string type = r.text("type");
  if (type == "excited") {
    s.kind = InitialStateConfig::Kind::excited;
  } else if (type == "thermal") {
    s.kind = InitialStateConfig::Kind::thermal;
    s.beta = r.real("beta");
    if (!(s.beta >= 0)) throw ConfigError(r.path("beta"), "must be non-negative");
  } else if (type == "neel") {
    s.kind = InitialStateConfig::Kind::neel;
  } else if (type == "pattern") {
    s.kind = InitialStateConfig::Kind::pattern;
    const json& p = r.at("pattern");
    if (!p.is_array() || p.empty()) throw ConfigError(r.path("pattern"), "expected a non-empty array");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto spin = p[i].is_string() ? systems::parse_spin(p[i].get<std::string>()) : std::nullopt;
      if (!spin)
        throw ConfigError(r.path("pattern") + "[" + std::to_string(i) + "]", "expected \"up\" or \"down\"");
      s.pattern.push_back(*spin);
    }
  } else {
    throw ConfigError(r.path("type"),
                      "unknown initial state '" + type + "' (excited, thermal, neel, pattern)");
  }
  r.finish();
  return s;
}

inline trajectories::TrajectoryConfig parse_trajectory(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  trajectories::TrajectoryConfig c;
  c.dt = r.real("dt");
  c.n_trajectories = r.count("n_trajectories");
  c.taylor_order = static_cast<unsigned>(r.count("taylor_order", 10));
  c.sample_every = r.count("sample_every", 1);
  c.threads = static_cast<unsigned>(r.count("threads", 1));
  if (!(c.dt > 0)) throw ConfigError(r.path("dt"), "must be positive");
  if (c.n_trajectories < 1) throw ConfigError(r.path("n_trajectories"), "must be >= 1");
  if (c.sample_every < 1) throw ConfigError(r.path("sample_every"), "must be >= 1");
  if (c.threads < 1) throw ConfigError(r.path("threads"), "must be >= 1");
  r.finish();
  return c;
}

inline trajectories::MettsConfig parse_metts(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  trajectories::MettsConfig c;
  c.beta = r.real("beta", 1.0);
  c.n_samples = r.count("n_samples", 1000);
  c.burn_in = r.count("burn_in", 10);
  const std::string basis = r.text("basis", "x");
  auto b = trajectories::parse_basis(basis);
  if (!b) throw ConfigError(r.path("basis"), "unknown basis '" + basis + "' (x, y, z)");
  c.basis = *b;
  c.alternate = r.boolean("alternate", true);
  if (!(c.beta >= 0)) throw ConfigError(r.path("beta"), "must be non-negative");
  if (c.n_samples < 1) throw ConfigError(r.path("n_samples"), "must be >= 1");
  r.finish();
  return c;
}

inline std::vector<Element> parse_elements(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of [i, j] pairs");
  std::vector<Element> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const json& e = j[k];
    const std::string here = path + "[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
        e[0].get<std::int64_t>() < 0 || e[1].get<std::int64_t>() < 0)
      throw ConfigError(here, "expected [i, j] with non-negative integers");
    out.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
  }
  return out;
}

inline RunConfig parse_run_config(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  RunConfig c;
  c.system = parse_system(r.at("system"), r.path("system"));
  c.integrator = parse_integrator(r.at("integrator"), r.path("integrator"));
  c.t_final = r.real("t_final");
  if (!(c.t_final >= 0)) throw ConfigError(r.path("t_final"), "must be non-negative");
  c.sample_every = r.count("sample_every", 1);
  if (c.sample_every < 1) throw ConfigError(r.path("sample_every"), "must be >= 1");
  if (const json* s = r.find("initial_state")) c.initial_state = parse_initial_state(*s, r.path("initial_state"));
  c.memory_budget_bytes = r.count("memory_budget_bytes", kDefaultMemoryBudget);
  c.seed = r.count("seed", 1);
  c.output_path = r.text("output_path", "");
  if (const json* e = r.find("elements")) c.elements = parse_elements(*e, r.path("elements"));
  if (const json* t = r.find("trajectory")) c.trajectory = parse_trajectory(*t, r.path("trajectory"));
  if (const json* m = r.find("metts")) c.metts = parse_metts(*m, r.path("metts"));
  r.finish();

  const std::size_t d = c.system.dimension();
  for (std::size_t k = 0; k < c.elements.size(); ++k)
    if (c.elements[k].first >= d || c.elements[k].second >= d)
      throw ConfigError(r.path("elements") + "[" + std::to_string(k) + "]",
                        "index out of range for dimension " + std::to_string(d));
  const auto kind = c.initial_state.kind;
  if ((kind == InitialStateConfig::Kind::neel || kind == InitialStateConfig::Kind::pattern) &&
      c.system.kind != SystemConfig::Kind::heisenberg)
    throw ConfigError(r.path("initial_state.type"), "neel and pattern states need a heisenberg system");
  if (kind == InitialStateConfig::Kind::pattern && c.initial_state.pattern.size() != c.system.chain.length)
    throw ConfigError(r.path("initial_state.pattern"),
                      "length " + std::to_string(c.initial_state.pattern.size()) +
                          " does not match chain length " + std::to_string(c.system.chain.length));
  return c;
}

}  // namespace detail

/// Parses JSON text; syntax errors report line and column.
inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("line " + std::to_string(line) + " column " + std::to_string(col),
                      std::string("invalid JSON: ") + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RunConfig parse_run_config(const json& j) { return detail::parse_run_config(j, ""); }
inline RunConfig parse_run_config(const std::string& text) { return parse_run_config(parse_json_text(text)); }

inline CompareConfig parse_compare_config(const json& j) {
  detail::ObjectReader r(j, "");
  CompareConfig c;
  c.a = detail::parse_run_config(r.at("a"), "a");
  c.b = detail::parse_run_config(r.at("b"), "b");
  c.reference = detail::parse_integrator(r.at("reference"), "reference");
  r.finish();
  if (!(c.a.system == c.b.system)) throw ConfigError("b.system", "does not match a.system");
  if (c.a.t_final != c.b.t_final) throw ConfigError("b.t_final", "does not match a.t_final");
  if (c.a.initial_state.kind != c.b.initial_state.kind || c.a.initial_state.beta != c.b.initial_state.beta ||
      c.a.initial_state.pattern != c.b.initial_state.pattern)
    throw ConfigError("b.initial_state", "does not match a.initial_state");
  return c;
}

inline BenchConfig parse_bench_config(const json& j) {
  detail::ObjectReader r(j, "");
  BenchConfig c;
  const json& methods = r.at("methods");
  if (!methods.is_array() || methods.empty()) throw ConfigError("methods", "expected a non-empty array");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto m = methods[i].is_string() ? integrators::parse_method(methods[i].get<std::string>()) : std::nullopt;
    if (!m) throw ConfigError("methods[" + std::to_string(i) + "]", "unknown method");
    c.methods.push_back(*m);
  }
  c.min_sites = r.count("min_sites");
  c.max_sites = r.count("max_sites");
  c.repeats = r.count("repeats", 3);
  c.dt = r.real("dt", 0.1);
  c.order = static_cast<unsigned>(r.count("order", 10));
  c.coupling = r.real("coupling", 1.0);
  c.gamma = r.real("gamma", 1.0);
  c.hbar = r.real("hbar", 1.0);
  c.memory_budget_bytes = r.count("memory_budget_bytes", kDefaultMemoryBudget);
  c.seed = r.count("seed", 1);
  c.output_path = r.text("output_path", "");
  if (const json* limits = r.find("run_limits")) {
    detail::ObjectReader lr(*limits, "run_limits");
    for (auto it = limits->begin(); it != limits->end(); ++it) {
      const auto m = integrators::parse_method(it.key());
      if (!m) throw ConfigError("run_limits." + it.key(), "unknown method");
      c.run_limits.emplace_back(*m, lr.count(it.key()));
    }
    lr.finish();
  }
  r.finish();
  if (c.min_sites < 1) throw ConfigError("min_sites", "must be >= 1");
  if (c.max_sites < c.min_sites) throw ConfigError("max_sites", "must be >= min_sites");
  if (c.max_sites > 16) throw ConfigError("max_sites", "must be <= 16");
  if (c.repeats < 3) throw ConfigError("repeats", "must be >= 3");
  if (!(c.dt > 0)) throw ConfigError("dt", "must be positive");
  if (c.order < 1) throw ConfigError("order", "must be >= 1");
  if (!(c.hbar > 0)) throw ConfigError("hbar", "must be positive");
  return c;
}

// ---------------------------------------------------------------------------
// Serialization of the effective configuration
// ---------------------------------------------------------------------------

inline json to_json(const SystemConfig& s) {
  json j;
  if (s.kind == SystemConfig::Kind::two_level) {
    j["type"] = "two_level";
    j["energy"] = s.two_level.energy;
    j["rabi"] = s.two_level.rabi;
    j["gamma"] = s.two_level.gamma;
    j["hbar"] = s.two_level.hbar;
  } else {
    j["type"] = "heisenberg";
    j["length"] = s.chain.length;
    j["coupling"] = s.chain.coupling;
    j["gamma"] = s.chain.gamma;
    j["hbar"] = s.chain.hbar;
  }
  return j;
}

inline json to_json(const integrators::IntegratorSpec& s) {
  json j;
  j["method"] = integrators::to_string(s.method);
  j["dt"] = s.dt;
  j["order"] = s.order;
  if (s.error_target) j["error_target"] = *s.error_target;
  if (s.lindbladian_norm) j["lindbladian_norm"] = *s.lindbladian_norm;
  j["max_order"] = s.max_order;
  json e;
  e["method"] = linalg::to_string(s.expm.method);
  e["order"] = s.expm.order;
  if (s.expm.scaling) e["scaling"] = *s.expm.scaling;
  j["expm"] = e;
  return j;
}

inline json to_json(const InitialStateConfig& s) {
  json j;
  switch (s.kind) {
    case InitialStateConfig::Kind::excited: j["type"] = "excited"; break;
    case InitialStateConfig::Kind::thermal:
      j["type"] = "thermal";
      j["beta"] = s.beta;
      break;
    case InitialStateConfig::Kind::neel: j["type"] = "neel"; break;
    case InitialStateConfig::Kind::pattern: {
      j["type"] = "pattern";
      json p = json::array();
      for (auto spin : s.pattern) p.push_back(spin == systems::Spin::up ? "up" : "down");
      j["pattern"] = p;
      break;
    }
  }
  return j;
}

inline json to_json(const RunConfig& c) {
  json j;
  j["system"] = to_json(c.system);
  j["integrator"] = to_json(c.integrator);
  j["t_final"] = c.t_final;
  j["sample_every"] = c.sample_every;
  j["initial_state"] = to_json(c.initial_state);
  j["memory_budget_bytes"] = c.memory_budget_bytes;
  j["seed"] = c.seed;
  if (!c.output_path.empty()) j["output_path"] = c.output_path;
  if (!c.elements.empty()) {
    json e = json::array();
    for (const auto& [i, k] : c.elements) e.push_back(json::array({i, k}));
    j["elements"] = e;
  }
  if (c.trajectory) {
    json t;
    t["dt"] = c.trajectory->dt;
    t["n_trajectories"] = c.trajectory->n_trajectories;
    t["taylor_order"] = c.trajectory->taylor_order;
    t["sample_every"] = c.trajectory->sample_every;
    t["threads"] = c.trajectory->threads;
    j["trajectory"] = t;
  }
  if (c.metts) {
    json m;
    m["beta"] = c.metts->beta;
    m["n_samples"] = c.metts->n_samples;
    m["burn_in"] = c.metts->burn_in;
    m["basis"] = trajectories::to_string(c.metts->basis);
    m["alternate"] = c.metts->alternate;
    j["metts"] = m;
  }
  return j;
}

inline json to_json(const CompareConfig& c) {
  json j;
  j["a"] = to_json(c.a);
  j["b"] = to_json(c.b);
  j["reference"] = to_json(c.reference);
  return j;
}

inline json to_json(const BenchConfig& c) {
  json j;
  json m = json::array();
  for (auto method : c.methods) m.push_back(integrators::to_string(method));
  j["methods"] = m;
  j["min_sites"] = c.min_sites;
  j["max_sites"] = c.max_sites;
  j["repeats"] = c.repeats;
  j["dt"] = c.dt;
  j["order"] = c.order;
  j["coupling"] = c.coupling;
  j["gamma"] = c.gamma;
  j["hbar"] = c.hbar;
  j["memory_budget_bytes"] = c.memory_budget_bytes;
  if (!c.run_limits.empty()) {
    json l;
    for (const auto& [method, sites] : c.run_limits) l[integrators::to_string(method)] = sites;
    j["run_limits"] = l;
  }
  j["seed"] = c.seed;
  if (!c.output_path.empty()) j["output_path"] = c.output_path;
  return j;
}

/// 64-bit FNV-1a of the compact serialization.
inline std::uint64_t config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace lindex::cli
