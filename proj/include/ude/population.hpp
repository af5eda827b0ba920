#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ude/individual.hpp"
#include "ude/rng.hpp"

namespace ude {

namespace detail {

// Order-statistic treap over (fitness, insertion_index) keys. Priorities are a
// deterministic hash of the insertion index, so the tree shape (and therefore
// every downstream random draw) is identical across platforms and runs.
// Supports insert / erase / rank / k-th smallest in O(log n) expected, which
// keeps the incrementally maintained sorted view affordable when the store
// grows unbounded (hundreds of thousands of members per run).
class RankTreap {
 public:
  void insert(double fitness, std::uint64_t insertion, std::uint32_t payload);
  void erase(double fitness, std::uint64_t insertion);
  // 1-based rank of an existing key (1 = fittest).
  std::size_t rank(double fitness, std::uint64_t insertion) const;
  // Payload of the k-th fittest key, k 1-based.
  std::uint32_t kth(std::size_t k) const;
  // Payload of the worst (largest) key.
  std::uint32_t worst() const;
  void set_payload(double fitness, std::uint64_t insertion, std::uint32_t payload);
  std::size_t size() const { return root_ == npos ? 0 : nodes_[root_].count; }

 private:
  static constexpr std::uint32_t npos = 0xFFFFFFFFu;
  struct Node {
    double fitness;
    std::uint64_t insertion;
    std::uint64_t priority;
    std::uint32_t payload;
    std::uint32_t left = npos;
    std::uint32_t right = npos;
    std::uint32_t count = 1;
  };

  bool key_less(std::uint32_t node, double fitness, std::uint64_t insertion) const {
    const Node& n = nodes_[node];
    return fitter(n.fitness, n.insertion, fitness, insertion);
  }

  std::uint32_t count(std::uint32_t n) const { return n == npos ? 0 : nodes_[n].count; }
  void pull(std::uint32_t n) {
    nodes_[n].count = 1 + count(nodes_[n].left) + count(nodes_[n].right);
  }

  // Splits t into keys < (fitness, insertion) and keys >= it.
  void split(std::uint32_t t, double fitness, std::uint64_t insertion,
             std::uint32_t& lo, std::uint32_t& hi);
  std::uint32_t merge(std::uint32_t lo, std::uint32_t hi);
  std::uint32_t find(double fitness, std::uint64_t insertion) const;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> free_;
  std::uint32_t root_ = npos;
};

}  // namespace detail

// Population container shared by every engine. Two modes:
//  - kSlots:  fixed roster of slots; offspring replace their parent in place
//    and the roster can shrink from the worst end (population-size schedules).
//  - kAppend: append-only; members are never removed and the container grows
//    without bound.
// In both modes a sorted view (by fitness, insertion order breaking ties) is
// maintained incrementally and queried by rank.
class PopulationStore {
 public:
  enum class Mode { kSlots, kAppend };

  explicit PopulationStore(Mode mode) : mode_(mode) {}

  Mode mode() const { return mode_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  const Individual& at(std::size_t index) const {
    if (index >= members_.size()) throw std::out_of_range("PopulationStore::at: bad index");
    return members_[index];
  }
  const Individual& operator[](std::size_t index) const { return members_[index]; }

  // Adds a member; returns its position. Positions are stable in kAppend mode.
  std::size_t append(Individual ind);

  // kSlots only: replaces the member at `slot`, keeping the sorted view current.
  void replace(std::size_t slot, Individual ind);

  // kSlots only: drops the least-fit member. The last member is swapped into
  // the vacated position, so positions are a permutation, not an order.
  void remove_worst();

  // 1-based rank of the member at `index` (rank 1 = fittest).
  std::size_t rank_of(std::size_t index) const;

  // Position of the member with 1-based rank `rank`.
  std::size_t index_of_rank(std::size_t rank) const;

  std::size_t best_index() const { return index_of_rank(1); }
  const Individual& best() const { return members_[best_index()]; }

 private:
  Mode mode_;
  std::vector<Individual> members_;
  detail::RankTreap view_;
};

// External archive of replaced parents (success-history DE variants). When the
// archive is full, a uniformly random member is evicted; shrinking the cap
// likewise evicts uniformly at random.
class Archive {
 public:
  explicit Archive(std::size_t capacity) : capacity_(capacity) {}

  std::size_t size() const { return members_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Individual& at(std::size_t i) const { return members_.at(i); }

  void add(Individual ind, RngStream& rng);
  void set_capacity(std::size_t capacity, RngStream& rng);

 private:
  std::size_t capacity_;
  std::vector<Individual> members_;
};

}  // namespace ude
