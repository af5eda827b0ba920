#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ude/population.hpp"
#include "ude/rng.hpp"

namespace ude {

// Uniform over the store minus excluded indices, by rejection resampling.
std::size_t select_uniform(const PopulationStore& store, RngStream& rng,
                           std::span<const std::size_t> exclude = {});

// Uniform over the best max(2, round(p * |P|)) members (by the sorted view).
std::size_t select_pbest(const PopulationStore& store, double p, RngStream& rng);

// Probability that rank i (1 = best) wins a tournament of n members sampled
// without replacement from N: C(N-i, n-1) / C(N, n) for i <= N-n+1, else 0.
// Reference distribution for the sampler tests.
double tournament_probability(std::size_t i, std::size_t n, std::size_t N);

// Tournament size for divisor T over a population of `pop_size` members:
// max(1, round(pop_size / T)), rounding half up.
std::size_t tournament_size(std::size_t pop_size, double T);

// Insertion-index residue classes modulo gensize; each class is one
// diversity-preserving tournament subset.
class DptBuckets {
 public:
  explicit DptBuckets(std::size_t gensize);
  std::size_t gensize() const { return buckets_.size(); }
  void add(std::uint64_t insertion_index, std::size_t store_index);
  const std::vector<std::uint32_t>& bucket(std::size_t j) const { return buckets_[j]; }

 private:
  std::vector<std::vector<std::uint32_t>> buckets_;
};

// Draws the subset indices (j_p, j_r1, j_r2) for one offspring: j_p is the
// offspring slot, j_r1 and j_r2 uniform with all three pairwise distinct.
// Requires gensize >= 3.
struct DptSubsets {
  std::size_t j_p, j_r1, j_r2;
};
DptSubsets draw_dpt_subsets(std::size_t gensize, std::size_t offspring_slot,
                            RngStream& rng);

// Tournament selection with reusable scratch buffers (the stamp array makes
// without-replacement draws O(1) amortized per candidate; selections happen
// hundreds of thousands of times per run over an ever-growing store).
class TournamentSelector {
 public:
  // Samples n = max(1, round(|P|/T)) candidates without replacement from the
  // store minus `exclude` (n clamped to the support size) and returns the
  // index of the fittest candidate.
  std::size_t select_t(const PopulationStore& store, double T, RngStream& rng,
                       std::span<const std::size_t> exclude = {});

  // Same contest restricted to bucket j; n = min(|S|, max(1, round(|P|/T)))
  // computed from the full store size.
  std::size_t select_dpt(const PopulationStore& store, const DptBuckets& buckets,
                         std::size_t j, double T, RngStream& rng);

 private:
  bool stamped(std::size_t idx) const {
    return idx < stamp_.size() && stamp_[idx] == epoch_;
  }
  void stamp(std::size_t idx) {
    if (idx >= stamp_.size()) stamp_.resize(idx + 1 + stamp_.size() / 2, 0);
    stamp_[idx] = epoch_;
  }
  void next_epoch() { ++epoch_; }

  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
  std::vector<std::uint32_t> scratch_;
};

// One-shot wrappers for the selector methods (tests and small callers).
std::size_t select_t(const PopulationStore& store, double T, RngStream& rng,
                     std::span<const std::size_t> exclude = {});
std::size_t select_dpt(const PopulationStore& store, const DptBuckets& buckets,
                       std::size_t j, double T, RngStream& rng);

}  // namespace ude
