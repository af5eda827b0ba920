#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ude/engine.hpp"
#include "ude/objective.hpp"

namespace ude {

// User-facing configuration mistakes: unreadable file, malformed line,
// unknown key, value out of range. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat view of an INI-style file. "[section]" headers plus "key = value"
// lines become "section.key" entries; '#' and ';' start comments; whitespace
// around keys and values is trimmed; a later duplicate overwrites an earlier
// one.
class ConfigMap {
 public:
  static ConfigMap parse_file(const std::string& path);
  static ConfigMap parse_string(const std::string& text,
                                const std::string& origin = "<inline>");

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated list value; empty when the key is absent.
  std::vector<std::string> get_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// CLI overrides applied on top of the config file.
struct PlanOverrides {
  std::optional<std::uint32_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out_dir;
  std::optional<std::string> engine;  // restrict the plan to one token
  std::optional<std::uint64_t> budget;
};

// Full description of one experiment: the algorithm x problem x trial grid
// plus everything needed to reproduce it byte-for-byte.
struct ExperimentPlan {
  std::vector<EngineConfig> algorithms;
  std::vector<FunctionId> problems;
  std::size_t dimension = 10;
  std::uint64_t budget = 10000;
  std::uint32_t trials = 51;
  std::uint64_t base_seed = 1;
  // When set, one shift instance per problem shared by every trial; otherwise
  // instances vary per trial (but are always shared across algorithms so
  // comparisons stay paired).
  std::optional<std::uint64_t> shift_seed;
  std::uint64_t checkpoint_stride = 0;  // 0 = budget / 200
  std::size_t workers = 1;
  std::string out_dir = "out";
  double alpha = 0.05;  // significance level used by the analysis stage

  void validate() const;  // throws ConfigError

  // Canonical listing of every result-affecting field (not workers, trials,
  // out_dir, or alpha: those change how much is run or analyzed, never the
  // bytes of any individual trial record).
  std::string canonical() const;
  // 16 hex digits over canonical(); embedded in records and the manifest.
  std::string hash() const;

  std::uint64_t resolved_stride() const;
};

// Engine instance for an algorithm token. Builtin tokens: de, shade, lshade,
// lshade-half, lshade-double, ude, ude-t, ude-dpt, ushade, ushade-t,
// ushade-dpt, ushade-df. Any other token must have a config section carrying
// "engine = <kind>". Global [selection]/[adaptation] keys apply first; keys
// in the token's own section win.
EngineConfig resolve_engine_token(const std::string& token, const ConfigMap& config);

// Builds and validates the plan; rejects unknown keys so typos never pass
// silently.
ExperimentPlan plan_from_config(const ConfigMap& config,
                                const PlanOverrides& overrides = {});

// Per-trial RNG seed: mixes (base_seed, token, problem, trial) so no two
// cells share a stream.
std::uint64_t trial_seed(const ExperimentPlan& plan, const std::string& token,
                         const std::string& problem, std::uint32_t trial);

// Seed for the problem instance's shift vector. Never depends on the
// algorithm token: all algorithms face the same instance in a given trial.
std::uint64_t instance_shift_seed(const ExperimentPlan& plan,
                                  const std::string& problem, std::uint32_t trial);

}  // namespace ude
