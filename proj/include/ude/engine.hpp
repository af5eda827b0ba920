#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "ude/adaptation.hpp"
#include "ude/objective.hpp"
#include "ude/population.hpp"
#include "ude/run_record.hpp"

namespace ude {

enum class EngineKind { de, shade, lshade, ude, ushade, ushade_df };

std::string engine_kind_name(EngineKind kind);

enum class SelectionPolicy { uniform, tournament, dpt };
SelectionPolicy selection_policy_from_name(const std::string& name);
std::string selection_policy_name(SelectionPolicy policy);

// How the unbounded engines' fixed tournament divisor T is chosen when it is
// not adapted: pinned to the initial population size, or an absolute value.
enum class TMode { fixed_p1, absolute };

struct EngineConfig {
  EngineKind kind = EngineKind::de;
  std::string token = "de";  // instance name used in outputs

  std::size_t pop_init = 0;  // |P^1|; 0 = kind default (100, or 18*D for
                             // the reduction/unbounded engines)
  std::size_t gensize = 100; // offspring per generation (unbounded family)
  double F = 0.5;            // fixed scale factor (non-adaptive engines)
  double C = 0.5;            // fixed crossover rate (non-adaptive engines)
  double pbest = 0.11;
  double archive_mult = 0.0;       // archive capacity multiplier; 0 = none
  std::size_t H = 0;               // success-history length; 0 = kind default
  SelectionPolicy policy = SelectionPolicy::tournament;  // unbounded family
  TMode t_mode = TMode::fixed_p1;
  double T_absolute = 0.0;
  double lpsr_target_frac = 1.0;  // reduction schedule target, fraction of budget
  std::size_t min_pop = 4;
  AdaptationParams adapt;
  std::uint64_t checkpoint_stride = 0;  // 0 = budget / 200
  bool freeze_history = false;  // diagnostic: skip success-history updates

  bool adaptive() const { return kind != EngineKind::de && kind != EngineKind::ude; }
  bool unbounded() const {
    return kind == EngineKind::ude || kind == EngineKind::ushade ||
           kind == EngineKind::ushade_df;
  }
  bool adapts_t() const {
    return kind == EngineKind::ushade || kind == EngineKind::ushade_df;
  }

  std::size_t resolved_pop_init(std::size_t dimension) const;
  std::size_t resolved_H(std::size_t dimension) const;

  void validate(std::size_t dimension) const;  // throws invalid_argument
};

// Next population size under the linear reduction schedule:
// round((P1 - min_pop) * (1 - consumed/target)) + min_pop, clamped to min_pop
// once the target is consumed.
std::size_t lpsr_next_size(std::size_t P1, std::uint64_t consumed_evals,
                           std::uint64_t target_budget, std::size_t min_pop = 4);

// Observation hooks for the structural-invariant tests: called after each
// generation's bookkeeping and once at termination. Never used by production
// callers; hooks may be left empty.
struct EngineProbe {
  std::function<void(std::uint64_t generation, std::uint64_t evals_used,
                     std::size_t pop_size, std::size_t archive_size)>
      after_generation;
  std::function<void(const PopulationStore& store)> at_end;
};

// Runs one trial of the configured engine against the objective. The record
// carries the full trajectory, lineage counters, and (for adaptive-T engines)
// the sampled-T trace.
RunRecord run_engine(const EngineConfig& config, Objective& objective,
                     std::uint64_t seed, const EngineProbe* probe = nullptr);

// Kind-checked wrappers.
RunRecord run_de(const EngineConfig& config, Objective& objective, std::uint64_t seed);
RunRecord run_shade(const EngineConfig& config, Objective& objective, std::uint64_t seed);
RunRecord run_lshade(const EngineConfig& config, Objective& objective, std::uint64_t seed);
RunRecord run_ude(const EngineConfig& config, Objective& objective, std::uint64_t seed);
RunRecord run_ushade(const EngineConfig& config, Objective& objective, std::uint64_t seed);
RunRecord run_ushade_df(const EngineConfig& config, Objective& objective,
                        std::uint64_t seed);

}  // namespace ude
