#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lindex/cli/commands.hpp"

using namespace lindex;
using namespace lindex::cli;
namespace fs = std::filesystem;

namespace {

const char* kTwoLevel = R"({
  "system": {"type": "two_level", "energy": 1.0, "rabi": 1.0, "gamma": 0.5, "hbar": 1.0},
  "integrator": {"method": "taylor_series", "dt": 0.5, "order": 10},
  "t_final": 20.0,
  "initial_state": {"type": "excited"},
  "elements": [[0, 0], [1, 1], [0, 1]],
  "seed": 1
})";

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string config_error_field(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

json two_level_json() { return json::parse(kTwoLevel); }

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("lindex_cli_test_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }
  [[nodiscard]] std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name)) << text;
    return file(name);
  }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LINDEX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// ---------------------------------------------------------------------------
// config parsing
// ---------------------------------------------------------------------------

TEST(Config, ParsesTwoLevel) {
  const auto c = parse_run_config(std::string(kTwoLevel));
  EXPECT_EQ(c.system.kind, SystemConfig::Kind::two_level);
  EXPECT_EQ(c.integrator.method, integrators::Method::taylor_series);
  EXPECT_EQ(c.integrator.order, 10u);
  EXPECT_EQ(c.t_final, 20.0);
  ASSERT_EQ(c.elements.size(), 3u);
  EXPECT_EQ(c.elements[2], (Element{0, 1}));
  EXPECT_EQ(c.memory_budget_bytes, kDefaultMemoryBudget);
}

TEST(Config, UnknownKeysReportDottedPath) {
  auto j = two_level_json();
  j["integrator"]["ordr"] = 3;
  EXPECT_EQ(config_error_field(j.dump()), "integrator.ordr");
  j = two_level_json();
  j["colour"] = "red";
  EXPECT_EQ(config_error_field(j.dump()), "colour");
  j = two_level_json();
  j["system"]["spin"] = 1;
  EXPECT_EQ(config_error_field(j.dump()), "system.spin");
}

TEST(Config, BadValuesReportField) {
  auto j = two_level_json();
  j["integrator"]["dt"] = -1;
  EXPECT_EQ(config_error_field(j.dump()), "integrator.dt");
  j = two_level_json();
  j["integrator"]["method"] = "euler";
  EXPECT_EQ(config_error_field(j.dump()), "integrator.method");
  j = two_level_json();
  j["elements"] = json::parse("[[0, 2]]");
  EXPECT_EQ(config_error_field(j.dump()), "elements[0]");
  j = two_level_json();
  j["initial_state"] = json::parse(R"({"type": "neel"})");
  EXPECT_EQ(config_error_field(j.dump()), "initial_state.type");
  j = two_level_json();
  j.erase("t_final");
  EXPECT_EQ(config_error_field(j.dump()), "t_final");
  j = two_level_json();
  j["sample_every"] = "two";
  EXPECT_EQ(config_error_field(j.dump()), "sample_every");
}

TEST(Config, PatternLengthMustMatchChain) {
  const auto text = R"({"system": {"type": "heisenberg", "length": 3},
    "integrator": {"method": "rk4", "dt": 0.1}, "t_final": 1,
    "initial_state": {"type": "pattern", "pattern": ["up", "down"]}})";
  EXPECT_EQ(config_error_field(text), "initial_state.pattern");
}

TEST(Config, SyntaxErrorReportsLine) {
  const std::string text = "{\n  \"system\": {\"type\": \"two_level\"},\n  \"t_final\": ,\n}";
  try {
    parse_json_text(text);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field().rfind("line 3 ", 0), 0u) << e.field();
  }
}

TEST(Config, JsonRoundTrip) {
  const auto c = parse_run_config(std::string(kTwoLevel));
  const auto again = parse_run_config(to_json(c));
  EXPECT_EQ(to_json(again).dump(), to_json(c).dump());
  EXPECT_EQ(config_hash(to_json(c)), config_hash(to_json(again)));
  auto j = two_level_json();
  j["t_final"] = 21;
  EXPECT_NE(config_hash(to_json(parse_run_config(j))), config_hash(to_json(c)));
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

TEST(Evolve, HeaderAndTrace) {
  const auto a = run_evolve(parse_run_config(std::string(kTwoLevel)));
  const auto rows = parse_csv(a.csv);
  ASSERT_EQ(rows.size(), 42u);  // header + 41 samples
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "rho_0_0_re", "rho_0_0_im", "rho_1_1_re", "rho_1_1_im",
                                               "rho_0_1_re", "rho_0_1_im", "trace", "error_bound"}));
  EXPECT_EQ(rows[1].back(), "0");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double p = std::stod(rows[r][1]) + std::stod(rows[r][3]);
    EXPECT_NEAR(p, 1.0, 1e-9) << "row " << r;
    EXPECT_GT(std::stod(rows[r].back()), -1.0);
  }
  EXPECT_EQ(a.manifest["command"], "evolve");
  EXPECT_EQ(a.manifest["version"], kVersion);
  EXPECT_EQ(a.manifest["rows"], 41);
  EXPECT_EQ(a.manifest["apply_count"], 400);
  EXPECT_EQ(a.manifest["config_hash"].get<std::string>().rfind("fnv1a64:", 0), 0u);
}

TEST(Evolve, ZeroFinalTimeIsInitialState) {
  auto j = two_level_json();
  j["t_final"] = 0.0;
  const auto rows = parse_csv(run_evolve(parse_run_config(j)).csv);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (std::vector<std::string>{"0", "0", "0", "1", "0", "0", "0", "1", "0"}));
}

TEST(Evolve, NonOrderMethodsHaveNoBound) {
  auto j = two_level_json();
  j["integrator"] = json::parse(R"({"method": "rk4", "dt": 0.1})");
  j["t_final"] = 1.0;
  const auto rows = parse_csv(run_evolve(parse_run_config(j)).csv);
  EXPECT_EQ(rows.back().back(), "nan");
}

TEST(Evolve, DefaultElementsAreDiagonal) {
  auto j = two_level_json();
  j.erase("elements");
  j["t_final"] = 1.0;
  const auto rows = parse_csv(run_evolve(parse_run_config(j)).csv);
  EXPECT_EQ(rows[0].size(), 7u);
  EXPECT_EQ(rows[0][3], "rho_1_1_re");
}

TEST(Evolve, RowCountProperty) {
  for (double t_final : {0.0, 0.3, 1.0, 2.05, 3.7})
    for (double dt : {0.1, 0.25})
      for (std::size_t every : {1u, 2u, 3u}) {
        auto j = two_level_json();
        j["t_final"] = t_final;
        j["integrator"]["dt"] = dt;
        j["sample_every"] = every;
        const auto rows = parse_csv(run_evolve(parse_run_config(j)).csv);
        const double ratio = t_final / (every * dt);
        std::size_t expect = 1 + static_cast<std::size_t>(std::floor(ratio + 1e-9));
        const double last_grid = std::floor(ratio + 1e-9) * every * dt;
        if (std::abs(last_grid - t_final) > 1e-9) ++expect;
        EXPECT_EQ(rows.size() - 1, expect) << t_final << " " << dt << " " << every;
      }
}

TEST(Evolve, DeterministicAndManifestReproduces) {
  const auto cfg = parse_run_config(std::string(kTwoLevel));
  const auto a = run_evolve(cfg);
  const auto b = run_evolve(cfg);
  EXPECT_EQ(a.csv, b.csv);
  const auto replay = run_evolve(parse_run_config(a.manifest["effective_config"]));
  EXPECT_EQ(replay.csv, a.csv);
  EXPECT_EQ(replay.manifest["config_hash"], a.manifest["config_hash"]);
}

TEST(Evolve, BudgetRefusal) {
  auto j = two_level_json();
  j["integrator"]["method"] = "vectorization_full";
  j["memory_budget_bytes"] = 255;
  EXPECT_THROW(run_evolve(parse_run_config(j)), MemoryBudgetExceeded);
  j["memory_budget_bytes"] = 256;
  EXPECT_NO_THROW(run_evolve(parse_run_config(j)));
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

TEST(Compare, SelfComparisonIsZero) {
  json j;
  j["a"] = two_level_json();
  j["b"] = two_level_json();
  j["reference"] = two_level_json()["integrator"];
  const auto a = run_compare(parse_compare_config(j));
  const auto rows = parse_csv(a.csv);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "method_a_dev", "method_b_dev"}));
  ASSERT_EQ(rows.size(), 42u);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    EXPECT_EQ(rows[r][1], "0");
    EXPECT_EQ(rows[r][2], "0");
  }
}

TEST(Compare, UsesSharedSampleTimes) {
  json j;
  j["a"] = two_level_json();
  j["b"] = two_level_json();
  j["b"]["integrator"] = json::parse(R"({"method": "rk4", "dt": 0.1})");
  j["b"]["sample_every"] = 5;
  j["reference"] = json::parse(R"({"method": "vectorization_full", "dt": 0.05})");
  const auto a = run_compare(parse_compare_config(j));
  const auto rows = parse_csv(a.csv);
  ASSERT_EQ(rows.size(), 42u);
  EXPECT_LT(std::stod(rows.back()[1]), 1e-6);
  EXPECT_LT(std::stod(rows.back()[2]), 1e-4);
  EXPECT_EQ(a.manifest["apply_count"]["b"], 800);
}

TEST(Compare, MismatchedSystemsAreConfigErrors) {
  json j;
  j["a"] = two_level_json();
  j["b"] = two_level_json();
  j["b"]["system"]["gamma"] = 0.25;
  j["reference"] = two_level_json()["integrator"];
  try {
    parse_compare_config(j);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "b.system");
  }
  j["b"] = two_level_json();
  j["b"]["t_final"] = 10;
  EXPECT_THROW(parse_compare_config(j), ConfigError);
}

TEST(Compare, ReferenceMustHitSampleTimes) {
  json j;
  j["a"] = two_level_json();
  j["b"] = two_level_json();
  j["reference"] = json::parse(R"({"method": "rk4", "dt": 0.3})");
  try {
    run_compare(parse_compare_config(j));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "reference.dt");
  }
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

BenchConfig small_bench() {
  BenchConfig c;
  c.methods = {integrators::Method::taylor_series, integrators::Method::rk4,
               integrators::Method::vectorization_full, integrators::Method::vectorization_taylor};
  c.min_sites = 1;
  c.max_sites = 3;
  c.repeats = 3;
  c.order = 7;
  c.memory_budget_bytes = master::superoperator_bytes<linalg::Complex>(4);
  return c;
}

TEST(Bench, RefusesExactlyAboveBudget) {
  const auto recs = bench_sweep(small_bench());
  ASSERT_EQ(recs.size(), 12u);
  for (const auto& r : recs) {
    const bool vec = integrators::uses_superoperator(r.method);
    const bool refused = r.status.rfind("refused", 0) == 0;
    EXPECT_EQ(refused, vec && r.sites == 3) << integrators::to_string(r.method) << " L=" << r.sites;
    EXPECT_EQ(r.seconds_per_step.has_value(), !refused);
    if (r.seconds_per_step) {
      EXPECT_GT(*r.seconds_per_step, 0.0);
    }
  }
}

TEST(Bench, ApplyCounts) {
  for (const auto& r : bench_sweep(small_bench())) {
    if (!r.seconds_per_step) continue;
    switch (r.method) {
      case integrators::Method::taylor_series: EXPECT_EQ(r.apply_count, 7u); break;
      case integrators::Method::vectorization_taylor: EXPECT_EQ(r.apply_count, 7u); break;
      case integrators::Method::rk4: EXPECT_EQ(r.apply_count, 4u); break;
      case integrators::Method::vectorization_full: EXPECT_EQ(r.apply_count, 1u); break;
    }
  }
}

TEST(Bench, RunLimitsSkipAdmissibleCells) {
  auto c = small_bench();
  c.memory_budget_bytes = kDefaultMemoryBudget;
  c.run_limits = {{integrators::Method::vectorization_full, 2}};
  const auto recs = bench_sweep(c);
  for (const auto& r : recs)
    if (r.method == integrators::Method::vectorization_full && r.sites == 3)
      {
        EXPECT_EQ(r.status.rfind("skipped", 0), 0u) << r.status;
      }
}

TEST(Bench, CsvAndConfig) {
  const auto a = run_bench(small_bench());
  const auto rows = parse_csv(a.csv);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"method", "sites", "dimension", "seconds_per_step", "apply_count",
                                               "peak_bytes_estimate", "status"}));
  ASSERT_EQ(rows.size(), 13u);
  for (std::size_t r = 1; r < rows.size(); ++r) EXPECT_EQ(rows[r].size(), 7u) << a.csv;
  const auto j = json::parse(R"({"methods": ["rk4"], "min_sites": 1, "max_sites": 2, "repeats": 2})");
  EXPECT_THROW(parse_bench_config(j), ConfigError);
  const auto bad = json::parse(R"({"methods": ["rk5"], "min_sites": 1, "max_sites": 2})");
  EXPECT_THROW(parse_bench_config(bad), ConfigError);
}

TEST(Bench, RepeatCapFromEnvironment) {
  ::setenv(kRepeatsEnv, "1", 1);
  EXPECT_EQ(effective_repeats(5), 1u);
  ::setenv(kRepeatsEnv, "junk", 1);
  EXPECT_EQ(effective_repeats(5), 5u);
  ::unsetenv(kRepeatsEnv);
  EXPECT_EQ(effective_repeats(5), 5u);
}

// ---------------------------------------------------------------------------
// traj and metts
// ---------------------------------------------------------------------------

TEST(Traj, SingleDecayTrajectoryJumpsOnce) {
  const auto text = R"({"system": {"type": "two_level", "rabi": 0.0},
    "integrator": {"method": "taylor_series", "dt": 0.1}, "t_final": 30,
    "trajectory": {"dt": 0.1, "n_trajectories": 1}, "seed": 4})";
  const auto a = run_traj(parse_run_config(std::string(text)));
  const auto rows = parse_csv(a.csv);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "element", "mcwf_value", "reference_value", "stderr_estimate"}));
  // population of |1> is 1 until the jump and 0 afterwards
  int switches = 0;
  bool up = true;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r][1] != "rho_1_1") continue;
    const double v = std::stod(rows[r][2]);
    EXPECT_TRUE(v == 0.0 || std::abs(v - 1.0) < 1e-12) << v;
    if ((v > 0.5) != up) ++switches;
    up = v > 0.5;
  }
  EXPECT_EQ(switches, 1);
}

TEST(Traj, ChainWithinThreeStandardErrors) {
  const auto text = R"({"system": {"type": "heisenberg", "length": 3},
    "integrator": {"method": "taylor_series", "dt": 0.05, "order": 12}, "t_final": 1,
    "initial_state": {"type": "neel"},
    "trajectory": {"dt": 0.01, "n_trajectories": 1000, "sample_every": 100}, "seed": 3})";
  const auto a = run_traj(parse_run_config(std::string(text)));
  const auto rows = parse_csv(a.csv);
  int checked = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (std::stod(rows[r][0]) != 1.0) continue;
    const double mc = std::stod(rows[r][2]), ref = std::stod(rows[r][3]), se = std::stod(rows[r][4]);
    EXPECT_LE(std::abs(mc - ref), 3 * se + 1e-12) << rows[r][1];
    ++checked;
  }
  EXPECT_EQ(checked, 8);
}

TEST(Traj, DeterministicAndDiagonalOnly) {
  const auto text = R"({"system": {"type": "two_level"},
    "integrator": {"method": "taylor_series", "dt": 0.1}, "t_final": 2,
    "trajectory": {"dt": 0.1, "n_trajectories": 50, "sample_every": 5}, "seed": 9})";
  const auto cfg = parse_run_config(std::string(text));
  EXPECT_EQ(run_traj(cfg).csv, run_traj(cfg).csv);
  auto other = cfg;
  other.seed = 10;
  EXPECT_NE(run_traj(other).csv, run_traj(cfg).csv);
  auto off = cfg;
  off.elements = {{0, 1}};
  EXPECT_THROW(run_traj(off), ConfigError);
  auto missing = cfg;
  missing.trajectory.reset();
  EXPECT_THROW(run_traj(missing), ConfigError);
}

TEST(Traj, WarnsOnLargeJumpProbability) {
  const auto text = R"({"system": {"type": "two_level", "gamma": 2.0},
    "integrator": {"method": "taylor_series", "dt": 0.1}, "t_final": 1,
    "trajectory": {"dt": 0.1, "n_trajectories": 5}})";
  const auto a = run_traj(parse_run_config(std::string(text)));
  ASSERT_EQ(a.warnings.size(), 1u);
  EXPECT_GT(a.manifest["max_jump_probability"].get<double>(), 0.1);
}

TEST(Metts, CsvMatchesThermal) {
  const auto text = R"({"system": {"type": "heisenberg", "length": 2},
    "integrator": {"method": "taylor_series", "dt": 0.1}, "t_final": 0,
    "metts": {"beta": 1.0, "n_samples": 2000}, "seed": 2})";
  const auto a = run_metts(parse_run_config(std::string(text)));
  const auto rows = parse_csv(a.csv);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"element", "metts_value", "thermal_value", "stderr_estimate"}));
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t r = 1; r < rows.size(); ++r)
    EXPECT_NEAR(std::stod(rows[r][1]), std::stod(rows[r][2]), 0.05) << rows[r][0];
  EXPECT_EQ(a.manifest["effective_config"]["metts"]["n_samples"], 2000);
}

// ---------------------------------------------------------------------------
// binary
// ---------------------------------------------------------------------------

TEST(Binary, EvolveWritesCsvAndManifest) {
  TempDir dir;
  const auto cfg = dir.write("c.json", kTwoLevel);
  ASSERT_EQ(run_cli("evolve --config " + cfg + " --out " + dir.file("o.csv")), 0);
  const auto csv = slurp(dir.file("o.csv"));
  EXPECT_EQ(csv, run_evolve(parse_run_config(std::string(kTwoLevel))).csv);
  const auto man = json::parse(slurp(dir.file("o.csv.manifest.json")));
  EXPECT_EQ(man["command"], "evolve");
  ASSERT_EQ(run_cli("evolve --config " + cfg + " --out " + dir.file("p.csv")), 0);
  EXPECT_EQ(slurp(dir.file("p.csv")), csv);
}

TEST(Binary, ExitCodes) {
  TempDir dir;
  const auto out = " --out " + dir.file("o.csv");
  auto j = two_level_json();
  j["bogus"] = 1;
  EXPECT_EQ(run_cli("evolve --config " + dir.write("bad.json", j.dump()) + out), 2);
  EXPECT_EQ(run_cli("evolve --config " + dir.write("syntax.json", "{\"a\": ") + out), 2);
  EXPECT_EQ(run_cli("evolve --config " + dir.file("missing.json") + out), 2);
  EXPECT_EQ(run_cli("evolve" + out), 2);

  j = two_level_json();
  j["integrator"]["method"] = "vectorization_full";
  const auto vec = dir.write("vec.json", j.dump());
  EXPECT_EQ(run_cli("evolve --config " + vec + out + " --budget-bytes 100"), 3);
  EXPECT_EQ(run_cli("evolve --config " + vec + out), 0);

  const auto blowup = R"({"system": {"type": "heisenberg", "length": 3},
    "integrator": {"method": "taylor_series", "dt": 1e10, "order": 40}, "t_final": 1e10,
    "initial_state": {"type": "neel"}})";
  EXPECT_EQ(run_cli("evolve --config " + dir.write("blow.json", blowup) + out), 4);

  const auto coarse = R"({"system": {"type": "two_level"},
    "integrator": {"method": "taylor_series", "dt": 1.0}, "t_final": 2,
    "trajectory": {"dt": 1.0, "n_trajectories": 3}})";
  EXPECT_EQ(run_cli("traj --config " + dir.write("coarse.json", coarse) + out), 5);
}

TEST(Binary, SeedOverride) {
  TempDir dir;
  const auto text = R"({"system": {"type": "two_level"},
    "integrator": {"method": "taylor_series", "dt": 0.1}, "t_final": 1,
    "trajectory": {"dt": 0.1, "n_trajectories": 20}, "seed": 1})";
  const auto cfg = dir.write("t.json", text);
  ASSERT_EQ(run_cli("traj --config " + cfg + " --out " + dir.file("a.csv") + " --seed 77"), 0);
  auto c = parse_run_config(std::string(text));
  c.seed = 77;
  EXPECT_EQ(slurp(dir.file("a.csv")), run_traj(c).csv);
  const auto man = json::parse(slurp(dir.file("a.csv.manifest.json")));
  EXPECT_EQ(man["seed"], 77);
}
