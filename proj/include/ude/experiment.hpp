#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ude/analysis.hpp"
#include "ude/config.hpp"

namespace ude {

// Output directory already holds results produced under a different plan;
// mixing them would corrupt the experiment. The CLI maps this to exit code 3.
struct ResultMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "1.0.0";

// Basename (no extension) of one cell-trial's record pair under <out>/records.
std::string record_stem(const std::string& token, const std::string& problem,
                        std::uint32_t trial);

// Executes every (algorithm, problem, trial) cell whose record pair is not
// already on disk, then writes/refreshes <out>/manifest.json. Refuses an
// output directory whose manifest records a different plan hash. Outputs are
// byte-identical for any worker count.
void run_experiment(const ExperimentPlan& plan);

// Writes ecdf.csv, wilcoxon.csv, lineage.csv, targets.csv, and analysis.json
// next to the records in <results_dir>. Stride, significance level, and plan
// hash come from the manifest when one is present.
void analyze_results(const std::string& results_dir);

// Improvement rates (best-so-far drop per 10^4 evaluations) before and after
// the budget midpoint -- the half-schedule endpoint -- per (algorithm,
// problem); rates are medians over trials, ratio = post / pre.
struct RobustnessRow {
  std::string algorithm;
  std::string problem;
  double rate_pre = 0.0;
  double rate_post = 0.0;
  double ratio = 0.0;
};

std::vector<RobustnessRow> robustness_table(const TrialMatrix& matrix);

// Checks the plan carries the reduction-schedule sweep (half / standard /
// double) plus a diversity-tournament ushade, runs any missing cells, and
// writes robustness.csv. Missing algorithms are a configuration error.
void robustness_suite(const ExperimentPlan& plan);

// Prints the per-problem ECDF target quartiles (CSV to `out`) and writes
// targets.csv into the results directory.
void write_targets(const std::string& results_dir, std::ostream& out);

}  // namespace ude
