#include "ude/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

namespace ude {

double quantile_linear(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile q outside [0,1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

EcdfTargets ecdf_targets(std::span<const double> pooled_finals) {
  if (pooled_finals.size() < 2) {
    throw std::invalid_argument("ecdf_targets: need at least 2 pooled finals");
  }
  EcdfTargets t;
  t.q1 = quantile_linear(pooled_finals, 0.25);
  t.median = quantile_linear(pooled_finals, 0.5);
  t.q3 = quantile_linear(pooled_finals, 0.75);
  return t;
}

std::vector<double> ecdf_curve(const std::vector<RunRecord>& records,
                               const EcdfTargets& targets,
                               std::span<const std::uint64_t> eval_grid) {
  if (records.empty()) throw std::invalid_argument("ecdf_curve: no records");
  const double levels[3] = {targets.q1, targets.median, targets.q3};
  std::vector<double> curve(eval_grid.size(), 0.0);
  for (std::size_t g = 0; g < eval_grid.size(); ++g) {
    double attained = 0.0;
    for (const RunRecord& rec : records) {
      // Grid points beyond the trial's budget clamp to its final value.
      const std::uint64_t e = std::min<std::uint64_t>(eval_grid[g], rec.budget);
      const double bsf = rec.best_at(e);
      for (double z : levels) {
        if (bsf < z) attained += 1.0;  // strict: ties with a target miss it
      }
    }
    curve[g] = attained / (3.0 * static_cast<double>(records.size()));
  }
  return curve;
}

std::string verdict_name(WilcoxonVerdict v) {
  switch (v) {
    case WilcoxonVerdict::a_better: return "a_better";
    case WilcoxonVerdict::b_better: return "b_better";
    case WilcoxonVerdict::no_difference: return "no_difference";
  }
  throw std::logic_error("unreachable");
}

namespace {

// Midranks of the pooled sample (ties share the average of their positions).
std::vector<double> midranks(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() + b.size();
  std::vector<std::pair<double, std::size_t>> pooled;
  pooled.reserve(n);
  for (std::size_t i = 0; i < a.size(); ++i) pooled.push_back({a[i], i});
  for (std::size_t i = 0; i < b.size(); ++i) pooled.push_back({b[i], a.size() + i});
  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[j + 1].first == pooled[i].first) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;  // average rank
    for (std::size_t k = i; k <= j; ++k) ranks[pooled[k].second] = r;
    i = j + 1;
  }
  return ranks;
}

// Counts size-k subsets of `ranks` whose sum deviates from the mean by at
// least `threshold` (exact two-sided tail), by depth-first enumeration.
void count_tail(const std::vector<double>& ranks, std::size_t next, std::size_t left,
                double sum, double mean, double threshold, std::uint64_t& hits,
                std::uint64_t& total) {
  if (left == 0) {
    ++total;
    if (std::fabs(sum - mean) >= threshold - 1e-9) ++hits;
    return;
  }
  if (ranks.size() - next < left) return;
  count_tail(ranks, next + 1, left - 1, sum + ranks[next], mean, threshold, hits, total);
  count_tail(ranks, next + 1, left, sum, mean, threshold, hits, total);
}

}  // namespace

WilcoxonResult wilcoxon_rank_sum(std::span<const double> sample_a,
                                 std::span<const double> sample_b, double alpha) {
  if (sample_a.empty() || sample_b.empty()) {
    throw std::invalid_argument("wilcoxon_rank_sum: samples must be non-empty");
  }
  const std::size_t na = sample_a.size(), nb = sample_b.size(), n = na + nb;
  const std::vector<double> ranks = midranks(sample_a, sample_b);

  double w_a = 0.0;
  for (std::size_t i = 0; i < na; ++i) w_a += ranks[i];
  const double mean_w = static_cast<double>(na) * static_cast<double>(n + 1) / 2.0;

  WilcoxonResult res;
  res.u_a = w_a - static_cast<double>(na) * static_cast<double>(na + 1) / 2.0;

  if (n <= 16) {
    res.exact = true;
    std::uint64_t hits = 0, total = 0;
    count_tail(ranks, 0, na, 0.0, mean_w, std::fabs(w_a - mean_w), hits, total);
    res.p = static_cast<double>(hits) / static_cast<double>(total);
  } else {
    res.exact = false;
    // Tie-corrected variance of W (equivalently of U).
    std::vector<double> sorted(ranks.begin(), ranks.end());
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
    const double na_d = static_cast<double>(na), nb_d = static_cast<double>(nb),
                 n_d = static_cast<double>(n);
    const double var = na_d * nb_d / 12.0 *
                       ((n_d + 1.0) - tie_term / (n_d * (n_d - 1.0)));
    if (var <= 0.0) {
      res.p = 1.0;  // all pooled values identical
    } else {
      const double dev = std::fabs(w_a - mean_w);
      const double z = std::max(0.0, dev - 0.5) / std::sqrt(var);  // continuity corr.
      res.p = std::erfc(z / std::sqrt(2.0));
    }
  }

  const double mean_u =
      static_cast<double>(na) * static_cast<double>(nb) / 2.0;
  if (res.p < alpha && res.u_a != mean_u) {
    res.verdict = res.u_a < mean_u ? WilcoxonVerdict::a_better : WilcoxonVerdict::b_better;
  } else {
    res.verdict = WilcoxonVerdict::no_difference;
  }
  return res;
}

std::optional<double> failed_parent_fraction(const RunRecord& record) {
  if (record.total_bsf_updates == 0) return std::nullopt;
  return static_cast<double>(record.failed_parent_updates) /
         static_cast<double>(record.total_bsf_updates);
}

void TrialMatrix::add(RunRecord record) {
  auto it = shapes_.find(record.problem);
  if (it == shapes_.end()) {
    shapes_[record.problem] = {record.dimension, record.budget};
  } else if (it->second != std::pair{record.dimension, record.budget}) {
    throw std::runtime_error("TrialMatrix: records for problem '" + record.problem +
                             "' disagree on dimension or budget");
  }
  cells_[{record.algorithm, record.problem}].push_back(std::move(record));
}

TrialMatrix TrialMatrix::load(const std::string& results_dir) {
  namespace fs = std::filesystem;
  TrialMatrix m;
  const fs::path dir = fs::path(results_dir) / "records";
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("no records directory under " + results_dir);
  }
  std::vector<fs::path> json_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") json_files.push_back(entry.path());
  }
  std::sort(json_files.begin(), json_files.end());
  for (const auto& jp : json_files) {
    fs::path cp = jp;
    cp.replace_extension(".csv");
    m.add(read_record(cp.string(), jp.string()));
  }
  if (m.cells_.empty()) throw std::runtime_error("no records found in " + dir.string());
  for (auto& [key, records] : m.cells_) {
    std::sort(records.begin(), records.end(),
              [](const RunRecord& a, const RunRecord& b) { return a.trial < b.trial; });
  }
  return m;
}

std::vector<std::string> TrialMatrix::algorithms() const {
  std::set<std::string> s;
  for (const auto& [key, value] : cells_) s.insert(key.first);
  return {s.begin(), s.end()};
}

std::vector<std::string> TrialMatrix::problems() const {
  std::set<std::string> s;
  for (const auto& [key, value] : cells_) s.insert(key.second);
  return {s.begin(), s.end()};
}

const std::vector<RunRecord>* TrialMatrix::cell(const std::string& algorithm,
                                                const std::string& problem) const {
  auto it = cells_.find({algorithm, problem});
  return it == cells_.end() ? nullptr : &it->second;
}

std::vector<double> TrialMatrix::finals(const std::string& algorithm,
                                        const std::string& problem) const {
  const auto* records = cell(algorithm, problem);
  if (!records) throw std::runtime_error("no records for " + algorithm + "/" + problem);
  std::vector<double> out;
  out.reserve(records->size());
  for (const auto& r : *records) out.push_back(r.final_best);
  return out;
}

std::uint64_t TrialMatrix::budget_of(const std::string& problem) const {
  auto it = shapes_.find(problem);
  if (it == shapes_.end()) throw std::runtime_error("unknown problem: " + problem);
  return it->second.second;
}

}  // namespace ude
