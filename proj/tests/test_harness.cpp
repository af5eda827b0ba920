#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ude/config.hpp"
#include "ude/experiment.hpp"

using namespace ude;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spew(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << content;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ude_harness_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small but real experiment: two engines, two problems, three trials.
const char* kBaseConfig = R"(
[experiment]
algorithms = de, ude
trials = 3
seed = 42

[objective]
function = sphere, rastrigin
dimension = 6
budget = 1500
shift_seed = 9
)";

ExperimentPlan small_plan(const std::string& out_dir) {
  PlanOverrides ov;
  ov.out_dir = out_dir;
  return plan_from_config(ConfigMap::parse_string(kBaseConfig, "base"), ov);
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> bytes;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      bytes[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
    }
  }
  return bytes;
}

}  // namespace

TEST_CASE("INI parsing: sections, comments, trimming, duplicates") {
  const auto cfg = ConfigMap::parse_string(
      "# leading comment\n"
      "[experiment]\n"
      "trials = 7   ; trailing comment\n"
      "  seed =   5\n"
      "\n"
      "[objective]\n"
      "function = sphere , ackley\n"
      "budget = 100\n"
      "budget = 200\n",  // duplicate: last one wins
      "test.ini");
  CHECK(cfg.has("experiment.trials"));
  CHECK(cfg.get_u64("experiment.trials", 0) == 7);
  CHECK(cfg.get_u64("experiment.seed", 0) == 5);
  CHECK(cfg.get_u64("objective.budget", 0) == 200);
  CHECK(cfg.get_list("objective.function") ==
        std::vector<std::string>{"sphere", "ackley"});
  CHECK_FALSE(cfg.has("experiment.missing"));
  CHECK(cfg.get_string("experiment.missing", "dflt") == "dflt");
}

TEST_CASE("INI parsing: malformed input carries origin and line number") {
  try {
    ConfigMap::parse_string("[experiment]\nnonsense line\n", "broken.ini");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("broken.ini:2") != std::string::npos);
  }
  CHECK_THROWS_AS(ConfigMap::parse_string("[unclosed\nkey = 1\n"), ConfigError);
  CHECK_THROWS_AS(ConfigMap::parse_string("key = 1\n[experiment]\n"), ConfigError);
  CHECK_THROWS_AS(ConfigMap::parse_file("/nonexistent/nowhere.ini"), ConfigError);
}

TEST_CASE("typed getters reject junk values") {
  const auto cfg = ConfigMap::parse_string(
      "[a]\nx = abc\ny = 1.5z\nz = -3\nb = maybe\nokay = 0.25\nflag = on\n");
  CHECK_THROWS_AS(cfg.get_double("a.x", 0.0), ConfigError);
  CHECK_THROWS_AS(cfg.get_double("a.y", 0.0), ConfigError);
  CHECK_THROWS_AS(cfg.get_u64("a.z", 0), ConfigError);
  CHECK_THROWS_AS(cfg.get_bool("a.b", false), ConfigError);
  CHECK(cfg.get_double("a.okay", 0.0) == 0.25);
  CHECK(cfg.get_bool("a.flag", false));
}

TEST_CASE("builtin tokens resolve to their published defaults") {
  const auto cfg = ConfigMap::parse_string("");

  const auto de = resolve_engine_token("de", cfg);
  CHECK(de.kind == EngineKind::de);
  CHECK(de.resolved_pop_init(10) == 100);
  CHECK(de.pbest == 0.11);
  CHECK(de.archive_mult == 0.0);
  CHECK(de.F == 0.5);
  CHECK(de.C == 0.5);

  const auto shade = resolve_engine_token("shade", cfg);
  CHECK(shade.pbest == 0.10);
  CHECK(shade.archive_mult == 2.0);
  CHECK(shade.resolved_pop_init(10) == 100);
  CHECK(shade.resolved_H(10) == 10);  // history length defaults to D

  const auto lshade = resolve_engine_token("lshade", cfg);
  CHECK(lshade.archive_mult == 1.4);
  CHECK(lshade.lpsr_target_frac == 1.0);
  CHECK(lshade.resolved_pop_init(10) == 180);
  CHECK(lshade.resolved_H(10) == 6);
  CHECK(resolve_engine_token("lshade-half", cfg).lpsr_target_frac == 0.5);
  CHECK(resolve_engine_token("lshade-double", cfg).lpsr_target_frac == 2.0);

  const auto ude_plain = resolve_engine_token("ude", cfg);
  CHECK(ude_plain.kind == EngineKind::ude);
  CHECK(ude_plain.policy == SelectionPolicy::tournament);
  CHECK(ude_plain.gensize == 100);
  CHECK(ude_plain.t_mode == TMode::fixed_p1);
  CHECK(ude_plain.resolved_pop_init(10) == 180);

  CHECK(resolve_engine_token("ude-t", cfg).policy == SelectionPolicy::tournament);
  CHECK(resolve_engine_token("ude-dpt", cfg).policy == SelectionPolicy::dpt);
  CHECK(resolve_engine_token("ushade-t", cfg).kind == EngineKind::ushade);
  CHECK(resolve_engine_token("ushade-dpt", cfg).policy == SelectionPolicy::dpt);

  const auto df = resolve_engine_token("ushade-df", cfg);
  CHECK(df.kind == EngineKind::ushade_df);
  CHECK(df.policy == SelectionPolicy::dpt);
  CHECK(df.adapt.T_min == 100.0);
  CHECK(df.adapt.sigma_T == 10.0);
}

TEST_CASE("token resolution precedence: global sections, then the token's own") {
  const auto cfg = ConfigMap::parse_string(
      "[selection]\n"
      "policy = uniform\n"
      "gensize = 50\n"
      "[adaptation]\n"
      "H = 12\n"
      "sigma_T = 5\n"
      "[ushade]\n"
      "sigma_T = 0\n"
      "H = 3\n"
      "[de]\n"
      "pop = 50\n"
      "F = 0.9\n");

  // Global selection applies to unpinned unbounded tokens...
  const auto u = resolve_engine_token("ude", cfg);
  CHECK(u.policy == SelectionPolicy::uniform);
  CHECK(u.gensize == 50);
  // ...but a policy pinned by the token name wins over the global.
  CHECK(resolve_engine_token("ude-dpt", cfg).policy == SelectionPolicy::dpt);

  // Global adaptation applies; the token's own section overrides it.
  const auto us = resolve_engine_token("ushade", cfg);
  CHECK(us.resolved_H(10) == 3);
  CHECK(us.adapt.sigma_T == 0.0);
  const auto udf = resolve_engine_token("ushade-df", cfg);
  CHECK(udf.resolved_H(10) == 12);
  CHECK(udf.adapt.sigma_T == 5.0);

  // Token sections override kind defaults.
  const auto de = resolve_engine_token("de", cfg);
  CHECK(de.resolved_pop_init(10) == 50);
  CHECK(de.F == 0.9);

  // A global absolute T switches the mode.
  const auto cfg_t = ConfigMap::parse_string("[selection]\nT = 40\n");
  const auto ut = resolve_engine_token("ude", cfg_t);
  CHECK(ut.t_mode == TMode::absolute);
  CHECK(ut.T_absolute == 40.0);
}

TEST_CASE("custom tokens need an engine kind; bad tokens are rejected") {
  const auto cfg = ConfigMap::parse_string("[myde]\nengine = de\npop = 64\n");
  const auto my = resolve_engine_token("myde", cfg);
  CHECK(my.kind == EngineKind::de);
  CHECK(my.resolved_pop_init(10) == 64);
  CHECK(my.token == "myde");

  CHECK_THROWS_AS(resolve_engine_token("mystery", cfg), ConfigError);
  CHECK_THROWS_AS(resolve_engine_token("bad token", cfg), ConfigError);
  CHECK_THROWS_AS(resolve_engine_token("", cfg), ConfigError);

  const auto bad = ConfigMap::parse_string("[myde]\nengine = frobnicator\n");
  CHECK_THROWS_AS(resolve_engine_token("myde", bad), ConfigError);
}

TEST_CASE("unknown keys and orphan sections are configuration errors") {
  PlanOverrides ov;
  const auto typo = ConfigMap::parse_string(
      "[experiment]\nalgorithms = de\ntrails = 3\n");  // typo: "trails"
  CHECK_THROWS_WITH_AS(plan_from_config(typo, ov),
                       doctest::Contains("experiment.trails"), ConfigError);

  const auto orphan = ConfigMap::parse_string(
      "[experiment]\nalgorithms = de\n[mystery]\npop = 5\n");
  CHECK_THROWS_AS(plan_from_config(orphan, ov), ConfigError);

  const auto bad_token_key = ConfigMap::parse_string(
      "[experiment]\nalgorithms = de\n[de]\npopulation = 5\n");
  CHECK_THROWS_WITH_AS(plan_from_config(bad_token_key, ov),
                       doctest::Contains("de.population"), ConfigError);

  // Sections for configured or builtin tokens pass, even unlisted ones.
  const auto fine = ConfigMap::parse_string(
      "[experiment]\nalgorithms = de\n[shade]\npop = 30\n");
  CHECK_NOTHROW(plan_from_config(fine, ov));
}

TEST_CASE("plans pick up defaults, config values, and overrides in order") {
  const auto minimal =
      ConfigMap::parse_string("[experiment]\nalgorithms = de\n");
  const auto plan = plan_from_config(minimal);
  CHECK(plan.trials == 51);
  CHECK(plan.base_seed == 1);
  CHECK(plan.alpha == 0.05);
  CHECK(plan.dimension == 10);
  CHECK(plan.budget == 10000);
  CHECK(plan.workers == 1);
  CHECK(plan.out_dir == "out");
  CHECK_FALSE(plan.shift_seed.has_value());
  CHECK(plan.problems == std::vector<FunctionId>{FunctionId::sphere});
  CHECK(plan.resolved_stride() == 50);  // budget / 200

  PlanOverrides ov;
  ov.trials = 5;
  ov.seed = 99;
  ov.workers = 2;
  ov.out_dir = "elsewhere";
  ov.budget = 4000;
  ov.engine = "ushade";
  const auto locked = plan_from_config(ConfigMap::parse_string(kBaseConfig), ov);
  CHECK(locked.trials == 5);
  CHECK(locked.base_seed == 99);
  CHECK(locked.workers == 2);
  CHECK(locked.out_dir == "elsewhere");
  CHECK(locked.budget == 4000);
  REQUIRE(locked.algorithms.size() == 1);
  CHECK(locked.algorithms[0].token == "ushade");
  CHECK(locked.shift_seed == 9);

  const auto empty = ConfigMap::parse_string("[objective]\nbudget = 10\n");
  CHECK_THROWS_WITH_AS(plan_from_config(empty), doctest::Contains("--engine"),
                       ConfigError);

  const auto bad_rng = ConfigMap::parse_string(
      "[experiment]\nalgorithms = de\nrng = lcg\n");
  CHECK_THROWS_AS(plan_from_config(bad_rng), ConfigError);

  const auto dup = ConfigMap::parse_string(
      "[experiment]\nalgorithms = de, de\n");
  CHECK_THROWS_AS(plan_from_config(dup), ConfigError);
}

TEST_CASE("engine validation failures name the offending token") {
  const auto cfg = ConfigMap::parse_string(
      "[experiment]\nalgorithms = ude-dpt\n[objective]\ndimension = 5\n");
  CHECK_THROWS_WITH_AS(plan_from_config(cfg), doctest::Contains("ude-dpt"),
                       ConfigError);
}

TEST_CASE("trial seeds are unique across the whole grid") {
  const auto plan = small_plan("unused");
  std::set<std::uint64_t> seeds;
  std::size_t count = 0;
  for (const auto& a : plan.algorithms) {
    for (const auto p : plan.problems) {
      for (std::uint32_t t = 0; t < 50; ++t) {
        seeds.insert(trial_seed(plan, a.token, function_name(p), t));
        ++count;
      }
    }
  }
  CHECK(seeds.size() == count);
}

TEST_CASE("instance seeds pair algorithms and follow the shift mode") {
  auto plan = small_plan("unused");  // shift_seed = 9: fixed instances
  const auto s0 = instance_shift_seed(plan, "sphere", 0);
  CHECK(instance_shift_seed(plan, "sphere", 7) == s0);  // trial-independent
  CHECK(instance_shift_seed(plan, "rastrigin", 0) != s0);

  plan.shift_seed.reset();  // per-trial instances
  const auto t0 = instance_shift_seed(plan, "sphere", 0);
  const auto t1 = instance_shift_seed(plan, "sphere", 1);
  CHECK(t0 != t1);
  CHECK(instance_shift_seed(plan, "sphere", 0) == t0);  // still deterministic
}

TEST_CASE("plan hashes ignore run-shape knobs and track result-affecting ones") {
  auto base = small_plan("a");
  const std::string h = base.hash();
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);

  auto same = small_plan("elsewhere");  // out_dir differs
  same.workers = 7;
  same.trials = 40;
  same.alpha = 0.01;
  CHECK(same.hash() == h);

  auto more_budget = small_plan("a");
  more_budget.budget = 2000;
  CHECK(more_budget.hash() != h);
  auto other_seed = small_plan("a");
  other_seed.base_seed = 43;
  CHECK(other_seed.hash() != h);
  auto fewer_algs = small_plan("a");
  fewer_algs.algorithms.pop_back();
  CHECK(fewer_algs.hash() != h);
  auto no_fixed_shift = small_plan("a");
  no_fixed_shift.shift_seed.reset();
  CHECK(no_fixed_shift.hash() != h);
}

TEST_CASE("record stems name the cell and trial") {
  CHECK(record_stem("de", "sphere", 3) == "de__sphere__t3");
  CHECK(record_stem("ushade-dpt", "ackley", 17) == "ushade-dpt__ackley__t17");
}

TEST_CASE("experiments run the full grid, idempotently and reproducibly") {
  const fs::path dir = fresh_dir("grid");
  const auto plan = small_plan(dir.string());
  run_experiment(plan);

  // 2 algorithms x 2 problems x 3 trials = 12 record pairs + the manifest.
  const fs::path records = dir / "records";
  REQUIRE(fs::is_directory(records));
  std::size_t csvs = 0, jsons = 0;
  for (const auto& entry : fs::directory_iterator(records)) {
    if (entry.path().extension() == ".csv") ++csvs;
    if (entry.path().extension() == ".json") ++jsons;
  }
  CHECK(csvs == 12);
  CHECK(jsons == 12);

  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest.at("plan_hash") == plan.hash());
  CHECK(manifest.at("rng") == "mt19937_64");
  CHECK(manifest.at("trials") == 3);
  CHECK(manifest.at("budget") == 1500);
  CHECK(manifest.at("shift_seed") == 9);
  CHECK(manifest.at("algorithms").size() == 2);
  CHECK(manifest.at("problems").size() == 2);
  CHECK(manifest.at("seeds").at("de/sphere").size() == 3);
  CHECK(manifest.at("seeds").at("de/sphere")[0] ==
        trial_seed(plan, "de", "sphere", 0));

  const auto rec = nlohmann::json::parse(slurp(records / "ude__rastrigin__t2.json"));
  CHECK(rec.at("config_hash") == plan.hash());
  CHECK(rec.at("algorithm") == "ude");
  CHECK(rec.at("problem") == "rastrigin");
  CHECK(rec.at("trial") == 2);
  CHECK(rec.at("seed") == trial_seed(plan, "ude", "rastrigin", 2));

  const std::string csv = slurp(records / "de__sphere__t0.csv");
  CHECK(csv.rfind("trial_id,eval_count,best_so_far\n", 0) == 0);

  SUBCASE("a second run over complete results rewrites nothing but the manifest") {
    const auto before = snapshot(dir);
    run_experiment(plan);
    const auto after = snapshot(dir);
    CHECK(before == after);
  }

  SUBCASE("missing pairs are regenerated byte-identically; existing ones are kept") {
    const auto original = snapshot(dir);
    fs::remove(records / "de__sphere__t1.csv");
    fs::remove(records / "de__sphere__t1.json");
    const std::string sentinel = "SENTINEL: do not touch\n";
    spew(records / "ude__sphere__t0.csv", sentinel);
    spew(records / "ude__sphere__t0.json", sentinel);

    run_experiment(plan);
    const auto after = snapshot(dir);
    CHECK(after.at("records/de__sphere__t1.csv") ==
          original.at("records/de__sphere__t1.csv"));
    CHECK(after.at("records/de__sphere__t1.json") ==
          original.at("records/de__sphere__t1.json"));
    CHECK(after.at("records/ude__sphere__t0.csv") == sentinel);
    CHECK(after.at("records/ude__sphere__t0.json") == sentinel);

    // Restore the records we vandalised so later cases see clean data.
    spew(records / "ude__sphere__t0.csv", original.at("records/ude__sphere__t0.csv"));
    spew(records / "ude__sphere__t0.json",
         original.at("records/ude__sphere__t0.json"));
  }

  SUBCASE("worker count changes scheduling, never bytes") {
    const fs::path par_dir = fresh_dir("grid_parallel");
    auto parallel = small_plan(par_dir.string());
    parallel.workers = 3;
    run_experiment(parallel);
    CHECK(snapshot(par_dir) == snapshot(dir));
  }

  SUBCASE("a different plan is refused over the same output directory") {
    auto other = small_plan(dir.string());
    other.base_seed = 777;
    CHECK_THROWS_AS(run_experiment(other), ResultMismatch);
    auto topped_up = small_plan(dir.string());
    topped_up.trials = 4;  // same hash: top-ups are allowed
    CHECK_NOTHROW(run_experiment(topped_up));
    for (const auto& a : {"de", "ude"}) {
      for (const auto& p : {"sphere", "rastrigin"}) {
        CHECK(fs::exists(records / (record_stem(a, p, 3) + ".csv")));
      }
    }
  }
}

TEST_CASE("analysis writes the full report set with coherent contents") {
  const fs::path dir = fresh_dir("analysis");
  const auto plan = small_plan(dir.string());
  run_experiment(plan);
  analyze_results(dir.string());

  for (const char* name :
       {"ecdf.csv", "wilcoxon.csv", "lineage.csv", "targets.csv", "analysis.json"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir / name));
  }

  const std::string targets = slurp(dir / "targets.csv");
  CHECK(targets.rfind("problem,q1,median,q3\n", 0) == 0);
  CHECK(std::count(targets.begin(), targets.end(), '\n') == 3);  // header + 2

  const std::string wilcoxon = slurp(dir / "wilcoxon.csv");
  CHECK(wilcoxon.rfind("problem,alg_a,alg_b,p,verdict\n", 0) == 0);
  CHECK(std::count(wilcoxon.begin(), wilcoxon.end(), '\n') == 3);  // 1 pair x 2

  const std::string ecdf = slurp(dir / "ecdf.csv");
  CHECK(ecdf.rfind("algorithm,problem,eval,attainment\n", 0) == 0);

  const std::string lineage = slurp(dir / "lineage.csv");
  CHECK(lineage.rfind("algorithm,problem,trial,fraction\n", 0) == 0);

  const auto meta = nlohmann::json::parse(slurp(dir / "analysis.json"));
  CHECK(meta.at("plan_hash") == plan.hash());
  CHECK(meta.at("alpha") == 0.05);
  CHECK(meta.at("ecdf_inequality") == "strict");
  CHECK(meta.at("targets").contains("sphere"));
  CHECK(meta.at("targets").contains("rastrigin"));

  std::ostringstream printed;
  write_targets(dir.string(), printed);
  CHECK(printed.str() == targets);

  const TrialMatrix matrix = TrialMatrix::load(dir.string());
  CHECK(matrix.algorithms() == std::vector<std::string>{"de", "ude"});
  CHECK(matrix.budget_of("sphere") == 1500);
  const auto rows = robustness_table(matrix);
  REQUIRE(rows.size() == 4);  // 2 algorithms x 2 problems
  for (const auto& row : rows) {
    CAPTURE(row.algorithm);
    CAPTURE(row.problem);
    CHECK(row.rate_pre >= 0.0);
    CHECK(row.rate_post >= 0.0);
    if (row.rate_pre > 0.0) {
      CHECK(row.ratio == row.rate_post / row.rate_pre);
    }
  }
}

TEST_CASE("the robustness suite demands its algorithm roster, then reports") {
  const char* text = R"(
[experiment]
algorithms = lshade-half, lshade, lshade-double, ushade-dpt
trials = 2
seed = 11

[objective]
function = sphere
dimension = 6
budget = 1200
shift_seed = 3
)";
  const fs::path dir = fresh_dir("robustness");
  PlanOverrides ov;
  ov.out_dir = dir.string();
  const auto plan = plan_from_config(ConfigMap::parse_string(text, "suite"), ov);
  robustness_suite(plan);

  const std::string csv = slurp(dir / "robustness.csv");
  CHECK(csv.rfind("algorithm,problem,rate_pre,rate_post,ratio\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 rows

  auto incomplete = plan;
  incomplete.out_dir = (dir / "missing").string();
  incomplete.algorithms.erase(incomplete.algorithms.begin());  // drop lshade-half
  CHECK_THROWS_WITH_AS(robustness_suite(incomplete),
                       doctest::Contains("lshade-half"), ConfigError);
}
