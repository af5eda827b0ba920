#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace ude {

struct TrajectoryPoint {
  std::uint64_t eval_count;
  double best_so_far;
};

// Per-trial result: best-so-far trajectory (recorded at every improvement and
// at checkpoint strides), lineage counters, and the sampled-T trace for the
// adaptive-tournament engines.
struct RunRecord {
  std::string algorithm;
  std::string problem;
  std::uint32_t trial = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::uint32_t dimension = 0;
  std::uint64_t budget = 0;

  std::vector<TrajectoryPoint> trajectory;
  std::vector<TrajectoryPoint> t_trace;  // (eval_count, sampled T)

  double final_best = std::numeric_limits<double>::infinity();
  std::uint64_t total_bsf_updates = 0;    // best-so-far updates by offspring
  std::uint64_t failed_parent_updates = 0;  // ... whose parent had failed

  double best_so_far() const {
    return trajectory.empty() ? std::numeric_limits<double>::infinity()
                              : trajectory.back().best_so_far;
  }

  // Appends a strict improvement. The very first recorded point establishes
  // the baseline and does not touch the lineage counters; from the second
  // update onward every call increments total_bsf_updates (and
  // failed_parent_updates when the improving offspring's parent had failed).
  void record_improvement(std::uint64_t eval_count, double fitness, bool parent_successful);

  // Trajectory point for improvements found while evaluating the initial
  // population. Lineage counters only ever describe offspring, so this path
  // never touches them.
  void record_initial(std::uint64_t eval_count, double fitness);

  // Appends a flat checkpoint at the current best (used at stride multiples
  // and at termination); never counts as an update.
  void record_checkpoint(std::uint64_t eval_count);

  // Best-so-far fitness at an evaluation count (value of the last trajectory
  // point at or before `eval_count`; +inf before the first point).
  double best_at(std::uint64_t eval_count) const;
};

// File formats: one CSV per trial with rows (trial_id, eval_count,
// best_so_far), plus a JSON summary next to it.
void write_record_csv(const RunRecord& record, const std::string& path);
void write_record_json(const RunRecord& record, const std::string& path);
RunRecord read_record(const std::string& csv_path, const std::string& json_path);

// Doubles are formatted with round-trip precision so re-reads are bit-exact.
std::string format_double(double v);

}  // namespace ude
