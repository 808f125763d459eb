// lindex_cli: evolve | compare | bench | traj | metts

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lindex/cli/commands.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kMemoryRefusal = 3,
  kNumericalFailure = 4,
  kStepSize = 5,
};

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> budget;
  std::optional<std::uint64_t> seed;
};

std::string resolve_out(const Options& o, const std::string& from_config) {
  if (!o.out.empty()) return o.out;
  if (!from_config.empty()) return from_config;
  throw lindex::cli::ConfigError("--out", "no output path given (use --out or output_path)");
}

void apply_overrides(lindex::cli::RunConfig& c, const Options& o) {
  if (o.budget) c.memory_budget_bytes = *o.budget;
  if (o.seed) c.seed = *o.seed;
}

void finish(const std::string& path, const lindex::cli::Artifact& a) {
  for (const auto& w : a.warnings) std::cerr << "warning: " << w << "\n";
  lindex::cli::write_artifact(path, a);
}

int run(const std::string& command, const Options& o) {
  using namespace lindex::cli;
  const json doc = parse_json_text(read_text_file(o.config));
  if (command == "compare") {
    auto c = parse_compare_config(doc);
    apply_overrides(c.a, o);
    apply_overrides(c.b, o);
    const auto path = resolve_out(o, c.a.output_path);
    finish(path, run_compare(c));
    return kOk;
  }
  if (command == "bench") {
    auto c = parse_bench_config(doc);
    if (o.budget) c.memory_budget_bytes = *o.budget;
    if (o.seed) c.seed = *o.seed;
    const auto path = resolve_out(o, c.output_path);
    finish(path, run_bench(c));
    return kOk;
  }
  auto c = parse_run_config(doc);
  apply_overrides(c, o);
  const auto path = resolve_out(o, c.output_path);
  if (command == "evolve") finish(path, run_evolve(c));
  else if (command == "traj") finish(path, run_traj(c));
  else finish(path, run_metts(c));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lindblad master-equation integrators and trajectory tools"};
  app.require_subcommand(1);
  Options opts;
  for (const char* name : {"evolve", "compare", "bench", "traj", "metts"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config, "JSON configuration file")->required();
    sub->add_option("--out", opts.out, "CSV output path (manifest goes beside it)");
    sub->add_option("--budget-bytes", opts.budget, "memory budget override in bytes");
    sub->add_option("--seed", opts.seed, "master seed override");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opts);
  } catch (const lindex::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const lindex::ContractViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const lindex::MemoryBudgetExceeded& e) {
    std::cerr << "memory budget: " << e.what() << "\n";
    return kMemoryRefusal;
  } catch (const lindex::StepSizeError& e) {
    std::cerr << "step size: " << e.what() << "\n";
    return kStepSize;
  } catch (const lindex::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const lindex::DegenerateState& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
