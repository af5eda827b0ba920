#include "ude/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "ude/engine.hpp"
#include "ude/rng.hpp"

namespace fs = std::filesystem;

namespace ude {
namespace {

struct Job {
  std::size_t alg;
  std::size_t prob;
  std::uint32_t trial;
};

void write_text_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

nlohmann::json engine_json(const EngineConfig& a, std::size_t dimension) {
  nlohmann::json j;
  j["token"] = a.token;
  j["kind"] = engine_kind_name(a.kind);
  j["pop"] = a.resolved_pop_init(dimension);
  j["gensize"] = a.gensize;
  j["F"] = a.F;
  j["C"] = a.C;
  j["pbest"] = a.pbest;
  j["archive_mult"] = a.archive_mult;
  j["H"] = a.resolved_H(dimension);
  j["policy"] = selection_policy_name(a.policy);
  j["t_mode"] = a.t_mode == TMode::absolute ? "absolute" : "p1";
  j["T"] = a.T_absolute;
  j["lpsr_target_frac"] = a.lpsr_target_frac;
  j["min_pop"] = a.min_pop;
  j["freeze_history"] = a.freeze_history;
  j["gamma_F"] = a.adapt.gamma_F;
  j["sigma_C"] = a.adapt.sigma_C;
  j["sigma_T"] = a.adapt.sigma_T;
  j["T_min"] = a.adapt.T_min;
  return j;
}

void write_manifest(const ExperimentPlan& plan, const fs::path& path) {
  nlohmann::json j;
  j["plan_hash"] = plan.hash();
  j["version"] = kVersion;
  j["rng"] = "mt19937_64";
  j["dimension"] = plan.dimension;
  j["budget"] = plan.budget;
  j["trials"] = plan.trials;
  j["base_seed"] = plan.base_seed;
  if (plan.shift_seed) {
    j["shift_seed"] = *plan.shift_seed;
  } else {
    j["shift_seed"] = nullptr;
  }
  j["stride"] = plan.resolved_stride();
  j["alpha"] = plan.alpha;
  auto& algs = j["algorithms"] = nlohmann::json::array();
  for (const auto& a : plan.algorithms) algs.push_back(engine_json(a, plan.dimension));
  auto& probs = j["problems"] = nlohmann::json::array();
  for (const auto p : plan.problems) probs.push_back(function_name(p));
  auto& seeds = j["seeds"] = nlohmann::json::object();
  for (const auto& a : plan.algorithms) {
    for (const auto p : plan.problems) {
      const std::string problem = function_name(p);
      auto& cell = seeds[a.token + "/" + problem] = nlohmann::json::array();
      for (std::uint32_t t = 0; t < plan.trials; ++t) {
        cell.push_back(trial_seed(plan, a.token, problem, t));
      }
    }
  }
  write_text_atomically(path, j.dump(2) + "\n");
}

std::optional<nlohmann::json> read_manifest(const fs::path& results_dir) {
  std::ifstream in(results_dir / "manifest.json");
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ResultMismatch("unreadable manifest in '" + results_dir.string() +
                         "': " + e.what());
  }
  return j;
}

void run_one(const ExperimentPlan& plan, const Job& job, const std::string& plan_hash,
             const fs::path& records_dir) {
  const EngineConfig& alg = plan.algorithms[job.alg];
  const FunctionId func = plan.problems[job.prob];
  const std::string problem = function_name(func);

  EngineConfig cfg = alg;
  cfg.checkpoint_stride = plan.resolved_stride();

  const ObjectiveSpec spec =
      ObjectiveSpec::make(func, plan.dimension, plan.budget,
                          instance_shift_seed(plan, problem, job.trial));
  Objective objective(spec);
  RunRecord rec = run_engine(cfg, objective, trial_seed(plan, alg.token, problem, job.trial));
  rec.trial = job.trial;
  rec.config_hash = plan_hash;

  const std::string stem = record_stem(alg.token, problem, job.trial);
  const fs::path csv = records_dir / (stem + ".csv");
  const fs::path json = records_dir / (stem + ".json");
  const fs::path csv_tmp = records_dir / (stem + ".csv.tmp");
  const fs::path json_tmp = records_dir / (stem + ".json.tmp");
  write_record_csv(rec, csv_tmp.string());
  write_record_json(rec, json_tmp.string());
  // Publish the JSON last: loaders treat the pair as complete only when both
  // files exist, and the CSV is renamed into place first.
  fs::rename(csv_tmp, csv);
  fs::rename(json_tmp, json);
}

double median_of(std::span<const double> values) {
  return quantile_linear(values, 0.5);
}

std::string csv_line(std::initializer_list<std::string> fields) {
  std::string line;
  for (const auto& f : fields) {
    if (!line.empty()) line += ',';
    line += f;
  }
  line += '\n';
  return line;
}

}  // namespace

std::string record_stem(const std::string& token, const std::string& problem,
                        std::uint32_t trial) {
  return token + "__" + problem + "__t" + std::to_string(trial);
}

void run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const fs::path out_dir(plan.out_dir);
  const fs::path records_dir = out_dir / "records";
  fs::create_directories(records_dir);

  const std::string plan_hash = plan.hash();
  if (const auto manifest = read_manifest(out_dir)) {
    const std::string existing = manifest->value("plan_hash", "");
    if (existing != plan_hash) {
      throw ResultMismatch("output directory '" + plan.out_dir +
                           "' holds results for plan " + existing +
                           " but this plan is " + plan_hash +
                           "; use a fresh directory or delete the old results");
    }
  }

  std::vector<Job> jobs;
  for (std::size_t a = 0; a < plan.algorithms.size(); ++a) {
    for (std::size_t p = 0; p < plan.problems.size(); ++p) {
      const std::string problem = function_name(plan.problems[p]);
      for (std::uint32_t t = 0; t < plan.trials; ++t) {
        const std::string stem = record_stem(plan.algorithms[a].token, problem, t);
        if (fs::exists(records_dir / (stem + ".csv")) &&
            fs::exists(records_dir / (stem + ".json"))) {
          continue;
        }
        jobs.push_back(Job{a, p, t});
      }
    }
  }

  const std::size_t workers = std::min<std::size_t>(std::max<std::size_t>(plan.workers, 1),
                                                    std::max<std::size_t>(jobs.size(), 1));
  if (workers <= 1) {
    for (const auto& job : jobs) run_one(plan, job, plan_hash, records_dir);
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!failed.load(std::memory_order_relaxed)) {
          const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
          if (i >= jobs.size()) break;
          try {
            run_one(plan, jobs[i], plan_hash, records_dir);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            failed.store(true, std::memory_order_relaxed);
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  write_manifest(plan, out_dir / "manifest.json");
}

std::vector<RobustnessRow> robustness_table(const TrialMatrix& matrix) {
  std::vector<RobustnessRow> rows;
  for (const auto& [key, records] : matrix.cells()) {
    const std::uint64_t budget = matrix.budget_of(key.second);
    const std::uint64_t half = budget / 2;
    if (half == 0 || half >= budget) {
      throw std::invalid_argument("budget too small for a midpoint split");
    }
    std::vector<double> pre, post;
    pre.reserve(records.size());
    post.reserve(records.size());
    for (const auto& rec : records) {
      if (rec.trajectory.empty()) continue;
      const double first = rec.trajectory.front().best_so_far;
      const double at_half = rec.best_at(half);
      const double at_end = rec.best_at(budget);
      pre.push_back((first - at_half) / static_cast<double>(half) * 1e4);
      post.push_back((at_half - at_end) / static_cast<double>(budget - half) * 1e4);
    }
    RobustnessRow row;
    row.algorithm = key.first;
    row.problem = key.second;
    if (!pre.empty()) {
      row.rate_pre = median_of(pre);
      row.rate_post = median_of(post);
      row.ratio = row.rate_pre > 0.0
                      ? row.rate_post / row.rate_pre
                      : std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void robustness_suite(const ExperimentPlan& plan) {
  bool has_half = false, has_standard = false, has_double = false, has_dpt = false;
  for (const auto& a : plan.algorithms) {
    if (a.kind == EngineKind::lshade) {
      if (a.lpsr_target_frac == 0.5) has_half = true;
      if (a.lpsr_target_frac == 1.0) has_standard = true;
      if (a.lpsr_target_frac == 2.0) has_double = true;
    }
    if (a.kind == EngineKind::ushade && a.policy == SelectionPolicy::dpt) {
      has_dpt = true;
    }
  }
  std::string missing;
  if (!has_half) missing += " lshade-half";
  if (!has_standard) missing += " lshade";
  if (!has_double) missing += " lshade-double";
  if (!has_dpt) missing += " ushade-dpt";
  if (!missing.empty()) {
    throw ConfigError("robustness suite needs these algorithms in the plan:" + missing);
  }

  run_experiment(plan);

  const TrialMatrix matrix = TrialMatrix::load(plan.out_dir);
  const auto rows = robustness_table(matrix);
  std::string csv = "algorithm,problem,rate_pre,rate_post,ratio\n";
  for (const auto& row : rows) {
    csv += csv_line({row.algorithm, row.problem, format_double(row.rate_pre),
                     format_double(row.rate_post), format_double(row.ratio)});
  }
  write_text_atomically(fs::path(plan.out_dir) / "robustness.csv", csv);
}

void analyze_results(const std::string& results_dir) {
  const TrialMatrix matrix = TrialMatrix::load(results_dir);

  double alpha = 0.05;
  std::string plan_hash;
  std::uint64_t manifest_stride = 0;
  if (const auto manifest = read_manifest(results_dir)) {
    alpha = manifest->value("alpha", alpha);
    plan_hash = manifest->value("plan_hash", "");
    manifest_stride = manifest->value("stride", manifest_stride);
  }

  const auto algorithms = matrix.algorithms();
  const auto problems = matrix.problems();

  // Pooled targets per problem.
  std::map<std::string, EcdfTargets> targets;
  std::string targets_csv = "problem,q1,median,q3\n";
  for (const auto& problem : problems) {
    std::vector<double> pooled;
    for (const auto& algorithm : algorithms) {
      const auto finals = matrix.finals(algorithm, problem);
      pooled.insert(pooled.end(), finals.begin(), finals.end());
    }
    const EcdfTargets t = ecdf_targets(pooled);
    targets.emplace(problem, t);
    targets_csv += csv_line({problem, format_double(t.q1), format_double(t.median),
                             format_double(t.q3)});
  }

  std::string ecdf_csv = "algorithm,problem,eval,attainment\n";
  for (const auto& problem : problems) {
    const std::uint64_t budget = matrix.budget_of(problem);
    const std::uint64_t stride =
        manifest_stride != 0 ? manifest_stride
                             : std::max<std::uint64_t>(1, budget / 200);
    std::vector<std::uint64_t> grid;
    for (std::uint64_t e = stride; e < budget; e += stride) grid.push_back(e);
    grid.push_back(budget);
    for (const auto& algorithm : algorithms) {
      const auto* cell = matrix.cell(algorithm, problem);
      if (cell == nullptr) continue;
      const auto curve = ecdf_curve(*cell, targets.at(problem), grid);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        ecdf_csv += csv_line({algorithm, problem, std::to_string(grid[i]),
                              format_double(curve[i])});
      }
    }
  }

  std::string wilcoxon_csv = "problem,alg_a,alg_b,p,verdict\n";
  for (const auto& problem : problems) {
    for (std::size_t i = 0; i < algorithms.size(); ++i) {
      for (std::size_t j = i + 1; j < algorithms.size(); ++j) {
        const auto a = matrix.finals(algorithms[i], problem);
        const auto b = matrix.finals(algorithms[j], problem);
        if (a.empty() || b.empty()) continue;
        const WilcoxonResult r = wilcoxon_rank_sum(a, b, alpha);
        wilcoxon_csv += csv_line({problem, algorithms[i], algorithms[j],
                                  format_double(r.p), verdict_name(r.verdict)});
      }
    }
  }

  std::string lineage_csv = "algorithm,problem,trial,fraction\n";
  for (const auto& [key, records] : matrix.cells()) {
    for (const auto& rec : records) {
      const auto fraction = failed_parent_fraction(rec);
      if (!fraction) continue;
      lineage_csv += csv_line({key.first, key.second, std::to_string(rec.trial),
                               format_double(*fraction)});
    }
  }

  nlohmann::json meta;
  meta["plan_hash"] = plan_hash;
  meta["alpha"] = alpha;
  meta["version"] = kVersion;
  meta["quantile_method"] = "linear interpolation between order statistics";
  meta["ecdf_inequality"] = "strict";
  meta["targets_per_problem"] = 3;
  auto& target_obj = meta["targets"] = nlohmann::json::object();
  for (const auto& [problem, t] : targets) {
    target_obj[problem] = {{"q1", t.q1}, {"median", t.median}, {"q3", t.q3}};
  }

  const fs::path dir(results_dir);
  write_text_atomically(dir / "targets.csv", targets_csv);
  write_text_atomically(dir / "ecdf.csv", ecdf_csv);
  write_text_atomically(dir / "wilcoxon.csv", wilcoxon_csv);
  write_text_atomically(dir / "lineage.csv", lineage_csv);
  write_text_atomically(dir / "analysis.json", meta.dump(2) + "\n");
}

void write_targets(const std::string& results_dir, std::ostream& out) {
  const TrialMatrix matrix = TrialMatrix::load(results_dir);
  const auto algorithms = matrix.algorithms();
  std::string csv = "problem,q1,median,q3\n";
  for (const auto& problem : matrix.problems()) {
    std::vector<double> pooled;
    for (const auto& algorithm : algorithms) {
      const auto finals = matrix.finals(algorithm, problem);
      pooled.insert(pooled.end(), finals.begin(), finals.end());
    }
    const EcdfTargets t = ecdf_targets(pooled);
    csv += csv_line({problem, format_double(t.q1), format_double(t.median),
                     format_double(t.q3)});
  }
  out << csv;
  write_text_atomically(fs::path(results_dir) / "targets.csv", csv);
}

}  // namespace ude
