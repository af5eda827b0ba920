#include "ude/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ude/population.hpp"
#include "ude/selection.hpp"
#include "ude/variation.hpp"

namespace ude {

std::string engine_kind_name(EngineKind kind) {
  switch (kind) {
    case EngineKind::de: return "de";
    case EngineKind::shade: return "shade";
    case EngineKind::lshade: return "lshade";
    case EngineKind::ude: return "ude";
    case EngineKind::ushade: return "ushade";
    case EngineKind::ushade_df: return "ushade-df";
  }
  throw std::logic_error("unreachable");
}

SelectionPolicy selection_policy_from_name(const std::string& name) {
  if (name == "uniform") return SelectionPolicy::uniform;
  if (name == "T" || name == "t" || name == "tournament") return SelectionPolicy::tournament;
  if (name == "DPT" || name == "dpt") return SelectionPolicy::dpt;
  throw std::invalid_argument("unknown selection policy: " + name);
}

std::string selection_policy_name(SelectionPolicy policy) {
  switch (policy) {
    case SelectionPolicy::uniform: return "uniform";
    case SelectionPolicy::tournament: return "T";
    case SelectionPolicy::dpt: return "DPT";
  }
  throw std::logic_error("unreachable");
}

std::size_t EngineConfig::resolved_pop_init(std::size_t dimension) const {
  if (pop_init != 0) return pop_init;
  if (kind == EngineKind::de || kind == EngineKind::shade) return 100;
  return 18 * dimension;
}

std::size_t EngineConfig::resolved_H(std::size_t dimension) const {
  if (H != 0) return H;
  return kind == EngineKind::shade ? dimension : 6;
}

void EngineConfig::validate(std::size_t dimension) const {
  const std::size_t p1 = resolved_pop_init(dimension);
  if (p1 < 4 || p1 < min_pop) {
    throw std::invalid_argument(token + ": initial population must be >= 4");
  }
  if (!(F > 0.0 && F <= 1.0)) throw std::invalid_argument(token + ": F must be in (0,1]");
  if (!(C >= 0.0 && C <= 1.0)) throw std::invalid_argument(token + ": C must be in [0,1]");
  if (!(pbest > 0.0 && pbest <= 1.0)) {
    throw std::invalid_argument(token + ": pbest rate must be in (0,1]");
  }
  if (archive_mult < 0.0) throw std::invalid_argument(token + ": archive multiplier < 0");
  if (adaptive() && resolved_H(dimension) == 0) {
    throw std::invalid_argument(token + ": history length must be >= 1");
  }
  if (unbounded()) {
    if (gensize == 0) throw std::invalid_argument(token + ": gensize must be >= 1");
    if (policy == SelectionPolicy::dpt) {
      if (gensize < 3) {
        throw std::invalid_argument(token + ": DPT needs gensize >= 3 for distinct subsets");
      }
      if (p1 < gensize) {
        throw std::invalid_argument(token +
                                    ": DPT needs |P^1| >= gensize so every subset is non-empty");
      }
    }
    if (t_mode == TMode::absolute && !(T_absolute >= 1.0)) {
      throw std::invalid_argument(token + ": absolute T must be >= 1");
    }
  }
  if (kind == EngineKind::lshade && !(lpsr_target_frac > 0.0)) {
    throw std::invalid_argument(token + ": reduction target fraction must be positive");
  }
  if (adapt.sigma_C < 0.0 || adapt.gamma_F < 0.0 || adapt.sigma_T < 0.0 ||
      adapt.T_min < 1.0) {
    throw std::invalid_argument(token + ": invalid adaptation parameters");
  }
}

std::size_t lpsr_next_size(std::size_t P1, std::uint64_t consumed_evals,
                           std::uint64_t target_budget, std::size_t min_pop) {
  if (target_budget == 0) throw std::invalid_argument("lpsr_next_size: target budget 0");
  if (P1 < min_pop) throw std::invalid_argument("lpsr_next_size: P1 below minimum");
  if (consumed_evals >= target_budget) return min_pop;
  const double frac = 1.0 - static_cast<double>(consumed_evals) /
                                static_cast<double>(target_budget);
  const auto size = std::llround(static_cast<double>(P1 - min_pop) * frac) +
                    static_cast<long long>(min_pop);
  return static_cast<std::size_t>(size);
}

namespace {

void maybe_checkpoint(RunRecord& rec, std::uint64_t eval_count, std::uint64_t stride) {
  if (stride != 0 && eval_count % stride == 0) rec.record_checkpoint(eval_count);
}

struct PendingOffspring {
  std::vector<double> genome;
  std::size_t parent_idx;
  double F, C, T;
};

// Shared initialization: uniform genomes, evaluated until the budget allows,
// appended in creation order. Improvements during this phase do not touch the
// lineage counters.
std::uint64_t evaluate_initial_population(
    Objective& obj, TrialRngs& rngs, PopulationStore& store, DptBuckets* buckets,
    RunRecord& rec, std::uint64_t stride, std::size_t P1) {
  auto genomes = clamp_population_init(obj.spec(), rngs.init, P1);
  std::uint64_t next_insertion = 0;
  for (auto& genome : genomes) {
    if (obj.remaining() == 0) break;
    const double f = obj.evaluate(genome);
    const std::uint64_t eval_at = obj.used();
    Individual ind;
    ind.genome = std::move(genome);
    ind.fitness = f;
    ind.insertion_index = next_insertion++;
    ind.successful = true;
    const std::uint64_t insertion = ind.insertion_index;
    const std::size_t pos = store.append(std::move(ind));
    if (buckets) buckets->add(insertion, pos);
    if (f < rec.best_so_far()) rec.record_initial(eval_at, f);
    maybe_checkpoint(rec, eval_at, stride);
  }
  return next_insertion;
}

RunRecord run_classical(const EngineConfig& cfg, Objective& obj, std::uint64_t seed,
                        const EngineProbe* probe) {
  const ObjectiveSpec& spec = obj.spec();
  cfg.validate(spec.dimension);
  if (obj.used() != 0) throw std::invalid_argument("objective already consumed");

  TrialRngs rngs(seed);
  RunRecord rec;
  rec.algorithm = cfg.token;
  rec.problem = function_name(spec.function);
  rec.seed = seed;
  rec.dimension = static_cast<std::uint32_t>(spec.dimension);
  rec.budget = spec.budget;
  const std::uint64_t stride =
      cfg.checkpoint_stride ? cfg.checkpoint_stride
                            : std::max<std::uint64_t>(1, spec.budget / 200);

  PopulationStore store(PopulationStore::Mode::kSlots);
  const std::size_t P1 = cfg.resolved_pop_init(spec.dimension);
  std::uint64_t next_insertion =
      evaluate_initial_population(obj, rngs, store, nullptr, rec, stride, P1);

  const bool adaptive = cfg.adaptive();
  SuccessHistory hist;
  if (adaptive) hist = SuccessHistory::make(cfg.resolved_H(spec.dimension));
  SuccessSets sets;
  Archive archive(adaptive ? static_cast<std::size_t>(std::llround(
                                 cfg.archive_mult * static_cast<double>(store.size())))
                           : 0);
  const auto lpsr_target = static_cast<std::uint64_t>(
      std::llround(cfg.lpsr_target_frac * static_cast<double>(spec.budget)));

  std::vector<PendingOffspring> pending;
  std::uint64_t generation = 0;
  while (obj.remaining() > 0) {
    const std::size_t N = store.size();
    const std::size_t m =
        static_cast<std::size_t>(std::min<std::uint64_t>(N, obj.remaining()));
    sets.clear();
    pending.clear();

    for (std::size_t i = 0; i < m; ++i) {
      double F = cfg.F, C = cfg.C;
      if (adaptive) {
        const std::size_t r = draw_slot(hist, rngs.params);
        F = sample_f_at(hist, r, rngs.params, cfg.adapt);
        C = sample_c_at(hist, r, rngs.params, cfg.adapt);
      }
      const std::size_t pbest_idx = select_pbest(store, cfg.pbest, rngs.selection);
      std::size_t r1;
      do {
        r1 = static_cast<std::size_t>(rngs.selection.below(N));
      } while (r1 == i);
      // r2 ranges over the population plus the archive.
      const std::size_t extended = N + archive.size();
      std::size_t r2;
      do {
        r2 = static_cast<std::size_t>(rngs.selection.below(extended));
      } while (r2 == i || r2 == r1);
      const std::vector<double>& x_r2 =
          r2 < N ? store[r2].genome : archive.at(r2 - N).genome;

      auto v = current_to_pbest(store[i].genome, store[pbest_idx].genome,
                                store[r1].genome, x_r2, F);
      auto u = binomial_crossover(store[i].genome, v, C, rngs.crossover);
      u = repair_bounds(std::move(u), store[i].genome, spec);
      pending.push_back({std::move(u), i, F, C, 0.0});
    }

    for (auto& o : pending) {
      const double fu = obj.evaluate(o.genome);
      const std::uint64_t eval_at = obj.used();
      const Individual& parent = store[o.parent_idx];
      const double parent_fitness = parent.fitness;
      const bool parent_successful = parent.successful;
      const std::uint64_t parent_insertion = parent.insertion_index;
      if (fu <= parent_fitness) {
        if (adaptive && fu < parent_fitness) sets.add(o.F, o.C, parent_fitness - fu);
        if (archive.capacity() > 0) archive.add(parent, rngs.archive);
        Individual child;
        child.genome = std::move(o.genome);
        child.fitness = fu;
        child.insertion_index = next_insertion++;
        child.parent_index = parent_insertion;
        child.successful = true;
        store.replace(o.parent_idx, std::move(child));
        if (fu < rec.best_so_far()) rec.record_improvement(eval_at, fu, parent_successful);
      }
      maybe_checkpoint(rec, eval_at, stride);
    }

    if (adaptive && !cfg.freeze_history) update_history(hist, sets);

    if (cfg.kind == EngineKind::lshade) {
      const std::size_t target_size =
          lpsr_next_size(P1, obj.used(), lpsr_target, cfg.min_pop);
      while (store.size() > target_size) store.remove_worst();
      archive.set_capacity(static_cast<std::size_t>(std::llround(
                               cfg.archive_mult * static_cast<double>(store.size()))),
                           rngs.archive);
    }
    ++generation;
    if (probe && probe->after_generation) {
      probe->after_generation(generation, obj.used(), store.size(), archive.size());
    }
  }

  rec.record_checkpoint(obj.used());
  if (probe && probe->at_end) probe->at_end(store);
  return rec;
}

RunRecord run_unbounded(const EngineConfig& cfg, Objective& obj, std::uint64_t seed,
                        const EngineProbe* probe) {
  const ObjectiveSpec& spec = obj.spec();
  cfg.validate(spec.dimension);
  if (obj.used() != 0) throw std::invalid_argument("objective already consumed");

  TrialRngs rngs(seed);
  RunRecord rec;
  rec.algorithm = cfg.token;
  rec.problem = function_name(spec.function);
  rec.seed = seed;
  rec.dimension = static_cast<std::uint32_t>(spec.dimension);
  rec.budget = spec.budget;
  const std::uint64_t stride =
      cfg.checkpoint_stride ? cfg.checkpoint_stride
                            : std::max<std::uint64_t>(1, spec.budget / 200);

  PopulationStore store(PopulationStore::Mode::kAppend);
  const std::size_t P1 = cfg.resolved_pop_init(spec.dimension);
  const bool use_dpt = cfg.policy == SelectionPolicy::dpt;
  DptBuckets buckets(cfg.gensize);
  std::uint64_t next_insertion = evaluate_initial_population(
      obj, rngs, store, use_dpt ? &buckets : nullptr, rec, stride, P1);

  const bool adaptive = cfg.adaptive();
  const bool keep_failed = cfg.kind != EngineKind::ushade_df;
  SuccessHistory hist;
  if (adaptive) {
    hist = SuccessHistory::make(cfg.resolved_H(spec.dimension), /*with_t=*/true,
                                static_cast<double>(store.size()), cfg.adapt.T_min);
  }
  SuccessSets sets;
  TournamentSelector selector;
  const double fixed_T = cfg.t_mode == TMode::absolute
                             ? cfg.T_absolute
                             : static_cast<double>(store.size());

  std::vector<PendingOffspring> pending;
  std::uint64_t generation = 0;
  while (obj.remaining() > 0) {
    const std::size_t m = static_cast<std::size_t>(
        std::min<std::uint64_t>(cfg.gensize, obj.remaining()));
    sets.clear();
    pending.clear();

    for (std::size_t i = 0; i < m; ++i) {
      double F = cfg.F, C = cfg.C, T = fixed_T;
      if (adaptive) {
        const std::size_t r = draw_slot(hist, rngs.params);
        F = sample_f_at(hist, r, rngs.params, cfg.adapt);
        C = sample_c_at(hist, r, rngs.params, cfg.adapt);
        T = sample_t_at(hist, r, rngs.params, cfg.adapt);
        rec.t_trace.push_back({obj.used(), T});
      }

      std::size_t p_idx, r1_idx, r2_idx;
      switch (cfg.policy) {
        case SelectionPolicy::dpt: {
          const DptSubsets js = draw_dpt_subsets(cfg.gensize, i, rngs.selection);
          p_idx = selector.select_dpt(store, buckets, js.j_p, T, rngs.selection);
          r1_idx = selector.select_dpt(store, buckets, js.j_r1, T, rngs.selection);
          r2_idx = selector.select_dpt(store, buckets, js.j_r2, T, rngs.selection);
          break;
        }
        case SelectionPolicy::tournament: {
          p_idx = selector.select_t(store, T, rngs.selection);
          const std::size_t ex1[] = {p_idx};
          r1_idx = selector.select_t(store, T, rngs.selection, ex1);
          const std::size_t ex2[] = {p_idx, r1_idx};
          r2_idx = selector.select_t(store, T, rngs.selection, ex2);
          break;
        }
        case SelectionPolicy::uniform: {
          p_idx = select_uniform(store, rngs.selection);
          const std::size_t ex1[] = {p_idx};
          r1_idx = select_uniform(store, rngs.selection, ex1);
          const std::size_t ex2[] = {p_idx, r1_idx};
          r2_idx = select_uniform(store, rngs.selection, ex2);
          break;
        }
        default: throw std::logic_error("unreachable");
      }
      const std::size_t pbest_idx = select_pbest(store, cfg.pbest, rngs.selection);

      auto v = current_to_pbest(store[p_idx].genome, store[pbest_idx].genome,
                                store[r1_idx].genome, store[r2_idx].genome, F);
      auto u = binomial_crossover(store[p_idx].genome, v, C, rngs.crossover);
      u = repair_bounds(std::move(u), store[p_idx].genome, spec);
      pending.push_back({std::move(u), p_idx, F, C, T});
    }

    for (auto& o : pending) {
      const double fu = obj.evaluate(o.genome);
      const std::uint64_t eval_at = obj.used();
      const double parent_fitness = store[o.parent_idx].fitness;
      const bool parent_successful = store[o.parent_idx].successful;
      const std::uint64_t parent_insertion = store[o.parent_idx].insertion_index;
      const bool success = fu <= parent_fitness;
      if (adaptive && fu < parent_fitness) {
        sets.add(o.F, o.C, o.T, parent_fitness - fu);
      }
      if (success || keep_failed) {
        Individual child;
        child.genome = std::move(o.genome);
        child.fitness = fu;
        child.insertion_index = next_insertion++;
        child.parent_index = parent_insertion;
        child.successful = success;
        const std::uint64_t insertion = child.insertion_index;
        const std::size_t pos = store.append(std::move(child));
        if (use_dpt) buckets.add(insertion, pos);
      }
      if (fu < rec.best_so_far()) rec.record_improvement(eval_at, fu, parent_successful);
      maybe_checkpoint(rec, eval_at, stride);
    }

    if (adaptive && !cfg.freeze_history) update_history(hist, sets);
    ++generation;
    if (probe && probe->after_generation) {
      probe->after_generation(generation, obj.used(), store.size(), 0);
    }
  }

  rec.record_checkpoint(obj.used());
  if (probe && probe->at_end) probe->at_end(store);
  return rec;
}

RunRecord run_checked(const EngineConfig& cfg, Objective& obj, std::uint64_t seed,
                      EngineKind expected) {
  if (cfg.kind != expected) {
    throw std::invalid_argument("engine config kind does not match the driver");
  }
  return run_engine(cfg, obj, seed);
}

}  // namespace

RunRecord run_engine(const EngineConfig& config, Objective& objective,
                     std::uint64_t seed, const EngineProbe* probe) {
  return config.unbounded() ? run_unbounded(config, objective, seed, probe)
                            : run_classical(config, objective, seed, probe);
}

RunRecord run_de(const EngineConfig& config, Objective& objective, std::uint64_t seed) {
  return run_checked(config, objective, seed, EngineKind::de);
}
RunRecord run_shade(const EngineConfig& config, Objective& objective, std::uint64_t seed) {
  return run_checked(config, objective, seed, EngineKind::shade);
}
RunRecord run_lshade(const EngineConfig& config, Objective& objective, std::uint64_t seed) {
  return run_checked(config, objective, seed, EngineKind::lshade);
}
RunRecord run_ude(const EngineConfig& config, Objective& objective, std::uint64_t seed) {
  return run_checked(config, objective, seed, EngineKind::ude);
}
RunRecord run_ushade(const EngineConfig& config, Objective& objective, std::uint64_t seed) {
  return run_checked(config, objective, seed, EngineKind::ushade);
}
RunRecord run_ushade_df(const EngineConfig& config, Objective& objective,
                        std::uint64_t seed) {
  return run_checked(config, objective, seed, EngineKind::ushade_df);
}

}  // namespace ude
