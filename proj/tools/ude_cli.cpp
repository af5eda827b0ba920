// Command-line front end: run experiment plans, analyze results, run the
// budget-robustness suite, and print ECDF targets.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ude/config.hpp"
#include "ude/experiment.hpp"

namespace {

struct CliFlags {
  std::string config_path;
  std::optional<std::uint32_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out_dir;
  std::optional<std::string> engine;
  std::optional<std::uint64_t> budget;
};

void add_plan_flags(CLI::App* cmd, CliFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Plan configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--trials", flags.trials, "Trials per (algorithm, problem) cell");
  cmd->add_option("--seed", flags.seed, "Base seed for all trial streams");
  cmd->add_option("--workers", flags.workers, "Worker threads (outputs identical to serial)");
  cmd->add_option("--out", flags.out_dir, "Output directory");
  cmd->add_option("--engine", flags.engine, "Run a single algorithm token instead of the configured list");
  cmd->add_option("--budget", flags.budget, "Evaluation budget override");
}

ude::ExperimentPlan load_plan(const CliFlags& flags) {
  ude::PlanOverrides overrides;
  overrides.trials = flags.trials;
  overrides.seed = flags.seed;
  overrides.workers = flags.workers;
  overrides.out_dir = flags.out_dir;
  overrides.engine = flags.engine;
  overrides.budget = flags.budget;
  return ude::plan_from_config(ude::ConfigMap::parse_file(flags.config_path), overrides);
}

// Results directory for the read-only commands: --out wins, then the config's
// experiment.out, then "out".
std::string results_dir(const std::optional<std::string>& out,
                        const std::string& config_path) {
  if (out) return *out;
  if (!config_path.empty()) {
    const auto cfg = ude::ConfigMap::parse_file(config_path);
    return cfg.get_string("experiment.out", "out");
  }
  return "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential-evolution experiment harness: bounded and "
               "unbounded-population engines with ECDF/Wilcoxon/lineage analysis"};
  app.require_subcommand(1);

  CliFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Execute the experiment plan");
  add_plan_flags(run_cmd, run_flags);

  CliFlags robustness_flags;
  auto* robustness_cmd =
      app.add_subcommand("robustness", "Run the reduction-schedule robustness suite");
  add_plan_flags(robustness_cmd, robustness_flags);

  std::optional<std::string> analyze_out;
  std::string analyze_config;
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "Compute ECDF, Wilcoxon, and lineage tables from results");
  analyze_cmd->add_option("--out", analyze_out, "Results directory");
  analyze_cmd->add_option("--config", analyze_config, "Plan configuration file")
      ->check(CLI::ExistingFile);

  std::optional<std::string> targets_out;
  std::string targets_config;
  auto* targets_cmd =
      app.add_subcommand("targets", "Print per-problem ECDF target quartiles");
  targets_cmd->add_option("--out", targets_out, "Results directory");
  targets_cmd->add_option("--config", targets_config, "Plan configuration file")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) {
      ude::run_experiment(load_plan(run_flags));
    } else if (robustness_cmd->parsed()) {
      ude::robustness_suite(load_plan(robustness_flags));
    } else if (analyze_cmd->parsed()) {
      ude::analyze_results(results_dir(analyze_out, analyze_config));
    } else if (targets_cmd->parsed()) {
      ude::write_targets(results_dir(targets_out, targets_config), std::cout);
    }
    return 0;
  } catch (const ude::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const ude::ResultMismatch& e) {
    std::cerr << "result mismatch: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
