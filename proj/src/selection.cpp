#include "ude/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ude {

namespace {

bool contains(std::span<const std::size_t> xs, std::size_t v) {
  for (std::size_t x : xs) {
    if (x == v) return true;
  }
  return false;
}

std::size_t count_valid_exclusions(std::span<const std::size_t> exclude, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t e : exclude) {
    if (e < n) ++c;
  }
  return c;
}

}  // namespace

std::size_t select_uniform(const PopulationStore& store, RngStream& rng,
                           std::span<const std::size_t> exclude) {
  const std::size_t n = store.size();
  if (n == 0 || count_valid_exclusions(exclude, n) >= n) {
    throw std::invalid_argument("select_uniform: empty support");
  }
  while (true) {
    const auto idx = static_cast<std::size_t>(rng.below(n));
    if (!contains(exclude, idx)) return idx;
  }
}

std::size_t select_pbest(const PopulationStore& store, double p, RngStream& rng) {
  const std::size_t n = store.size();
  if (n < 2) throw std::invalid_argument("select_pbest: store must hold >= 2 members");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("select_pbest: p must be in (0,1]");
  auto k = static_cast<std::size_t>(std::llround(p * static_cast<double>(n)));
  k = std::max<std::size_t>(2, k);
  k = std::min(k, n);
  const std::size_t rank = 1 + static_cast<std::size_t>(rng.below(k));
  return store.index_of_rank(rank);
}

double tournament_probability(std::size_t i, std::size_t n, std::size_t N) {
  if (i < 1 || i > N || n < 1 || n > N) {
    throw std::invalid_argument("tournament_probability: require 1 <= i <= N, 1 <= n <= N");
  }
  if (i > N - n + 1) return 0.0;
  // C(N-i, n-1) / C(N, n), evaluated as a product of ratios to stay in range.
  double p = static_cast<double>(n) / static_cast<double>(N - n + 1);
  for (std::size_t j = 1; j < n; ++j) {
    p *= static_cast<double>(N - i - j + 1) / static_cast<double>(N - j + 1);
  }
  return p;
}

std::size_t tournament_size(std::size_t pop_size, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("tournament divisor T must be positive");
  const auto n = std::llround(static_cast<double>(pop_size) / T);
  return n < 1 ? 1 : static_cast<std::size_t>(n);
}

DptBuckets::DptBuckets(std::size_t gensize) : buckets_(gensize) {
  if (gensize == 0) throw std::invalid_argument("DptBuckets: gensize must be >= 1");
}

void DptBuckets::add(std::uint64_t insertion_index, std::size_t store_index) {
  buckets_[insertion_index % buckets_.size()].push_back(
      static_cast<std::uint32_t>(store_index));
}

DptSubsets draw_dpt_subsets(std::size_t gensize, std::size_t offspring_slot,
                            RngStream& rng) {
  if (gensize < 3) {
    throw std::invalid_argument("draw_dpt_subsets: gensize must be >= 3 for distinct subsets");
  }
  if (offspring_slot >= gensize) {
    throw std::invalid_argument("draw_dpt_subsets: offspring slot out of range");
  }
  DptSubsets s{offspring_slot, 0, 0};
  do {
    s.j_r1 = static_cast<std::size_t>(rng.below(gensize));
  } while (s.j_r1 == s.j_p);
  do {
    s.j_r2 = static_cast<std::size_t>(rng.below(gensize));
  } while (s.j_r2 == s.j_p || s.j_r2 == s.j_r1);
  return s;
}

std::size_t TournamentSelector::select_t(const PopulationStore& store, double T,
                                         RngStream& rng,
                                         std::span<const std::size_t> exclude) {
  const std::size_t N = store.size();
  const std::size_t excluded = count_valid_exclusions(exclude, N);
  if (N == 0 || excluded >= N) throw std::invalid_argument("select_t: empty support");
  const std::size_t m = N - excluded;
  const std::size_t n_eff = std::min(tournament_size(N, T), m);

  if (n_eff == m) {
    // Tournament covers the whole support: the winner is the best
    // non-excluded member, found through the sorted view.
    for (std::size_t rank = 1; rank <= N; ++rank) {
      const std::size_t idx = store.index_of_rank(rank);
      if (!contains(exclude, idx)) return idx;
    }
    throw std::logic_error("select_t: unreachable");
  }

  std::size_t best = N;  // sentinel
  if (2 * n_eff <= m) {
    // Sparse draw: rejection sampling with stamped indices.
    next_epoch();
    for (std::size_t e : exclude) {
      if (e < N) stamp(e);
    }
    for (std::size_t k = 0; k < n_eff; ++k) {
      std::size_t idx;
      do {
        idx = static_cast<std::size_t>(rng.below(N));
      } while (stamped(idx));
      stamp(idx);
      if (best == N || fitter(store[idx], store[best])) best = idx;
    }
  } else {
    // Dense draw: materialize the support and run a partial Fisher-Yates.
    scratch_.clear();
    for (std::size_t idx = 0; idx < N; ++idx) {
      if (!contains(exclude, idx)) scratch_.push_back(static_cast<std::uint32_t>(idx));
    }
    for (std::size_t k = 0; k < n_eff; ++k) {
      const std::size_t pick = k + static_cast<std::size_t>(rng.below(m - k));
      std::swap(scratch_[k], scratch_[pick]);
      const std::size_t idx = scratch_[k];
      if (best == N || fitter(store[idx], store[best])) best = idx;
    }
  }
  return best;
}

std::size_t TournamentSelector::select_dpt(const PopulationStore& store,
                                           const DptBuckets& buckets, std::size_t j,
                                           double T, RngStream& rng) {
  if (j >= buckets.gensize()) throw std::invalid_argument("select_dpt: subset index out of range");
  const auto& subset = buckets.bucket(j);
  const std::size_t m = subset.size();
  if (m == 0) throw std::invalid_argument("select_dpt: empty subset (requires |P^1| >= gensize)");
  // Tournament size comes from the full population, then clamps to the subset.
  const std::size_t n_eff = std::min(tournament_size(store.size(), T), m);

  std::size_t best = store.size();  // sentinel
  if (n_eff == m) {
    for (std::uint32_t idx : subset) {
      if (best == store.size() || fitter(store[idx], store[best])) best = idx;
    }
  } else if (2 * n_eff <= m) {
    // Rejection over subset positions (stamps index positions, not members).
    next_epoch();
    for (std::size_t k = 0; k < n_eff; ++k) {
      std::size_t pos;
      do {
        pos = static_cast<std::size_t>(rng.below(m));
      } while (stamped(pos));
      stamp(pos);
      const std::size_t idx = subset[pos];
      if (best == store.size() || fitter(store[idx], store[best])) best = idx;
    }
  } else {
    scratch_.assign(subset.begin(), subset.end());
    for (std::size_t k = 0; k < n_eff; ++k) {
      const std::size_t pick = k + static_cast<std::size_t>(rng.below(m - k));
      std::swap(scratch_[k], scratch_[pick]);
      const std::size_t idx = scratch_[k];
      if (best == store.size() || fitter(store[idx], store[best])) best = idx;
    }
  }
  return best;
}

std::size_t select_t(const PopulationStore& store, double T, RngStream& rng,
                     std::span<const std::size_t> exclude) {
  TournamentSelector selector;
  return selector.select_t(store, T, rng, exclude);
}

std::size_t select_dpt(const PopulationStore& store, const DptBuckets& buckets,
                       std::size_t j, double T, RngStream& rng) {
  TournamentSelector selector;
  return selector.select_dpt(store, buckets, j, T, rng);
}

}  // namespace ude
