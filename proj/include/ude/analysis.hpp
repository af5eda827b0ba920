#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ude/run_record.hpp"

namespace ude {

// Linear-interpolation quantile between order statistics (the common "type 7"
// convention): h = (n-1)*q, result = x[floor(h)] + frac(h) * (x[floor(h)+1] -
// x[floor(h)]) over the sorted values.
double quantile_linear(std::span<const double> values, double q);

struct EcdfTargets {
  double q1, median, q3;
};

// Quartile/median targets over the pooled final fitnesses of all compared
// algorithms on one problem.
EcdfTargets ecdf_targets(std::span<const double> pooled_finals);

// Fraction of trials whose best-so-far at each grid evaluation count lies
// strictly below each target, averaged over the three targets.
std::vector<double> ecdf_curve(const std::vector<RunRecord>& records,
                               const EcdfTargets& targets,
                               std::span<const std::uint64_t> eval_grid);

enum class WilcoxonVerdict { a_better, b_better, no_difference };
std::string verdict_name(WilcoxonVerdict v);

struct WilcoxonResult {
  double p = 1.0;
  WilcoxonVerdict verdict = WilcoxonVerdict::no_difference;
  double u_a = 0.0;  // Mann-Whitney statistic of sample a
  bool exact = false;
};

// Two-sided rank-sum test. Exact enumeration over all C(n_a+n_b, n_a)
// arrangements when n_a + n_b <= 16; otherwise the normal approximation with
// tie and continuity corrections. Direction (minimization): sample a is
// better when its rank sum is low.
WilcoxonResult wilcoxon_rank_sum(std::span<const double> sample_a,
                                 std::span<const double> sample_b,
                                 double alpha = 0.05);

// failed_parent_updates / total_bsf_updates; absent when there were no
// counted updates.
std::optional<double> failed_parent_fraction(const RunRecord& record);

// All trial records of one experiment, keyed by (algorithm, problem).
class TrialMatrix {
 public:
  using Key = std::pair<std::string, std::string>;

  void add(RunRecord record);
  // Loads every record under <results_dir>/records.
  static TrialMatrix load(const std::string& results_dir);

  const std::map<Key, std::vector<RunRecord>>& cells() const { return cells_; }
  std::vector<std::string> algorithms() const;
  std::vector<std::string> problems() const;
  const std::vector<RunRecord>* cell(const std::string& algorithm,
                                     const std::string& problem) const;
  std::vector<double> finals(const std::string& algorithm,
                             const std::string& problem) const;
  // Budget shared by every record of a problem (validated on load).
  std::uint64_t budget_of(const std::string& problem) const;

 private:
  std::map<Key, std::vector<RunRecord>> cells_;
  std::map<std::string, std::pair<std::uint32_t, std::uint64_t>> shapes_;  // dim, budget
};

}  // namespace ude
