#include "ude/population.hpp"

#include <utility>

namespace ude {
namespace detail {

namespace {
std::uint64_t priority_of(std::uint64_t insertion) {
  std::uint64_t s = insertion ^ 0x9E3779B97F4A7C15ULL;
  return splitmix64_next(s);
}
}  // namespace

void RankTreap::split(std::uint32_t t, double fitness, std::uint64_t insertion,
                      std::uint32_t& lo, std::uint32_t& hi) {
  if (t == npos) {
    lo = hi = npos;
    return;
  }
  if (key_less(t, fitness, insertion)) {
    lo = t;
    split(nodes_[t].right, fitness, insertion, nodes_[t].right, hi);
    pull(lo);
  } else {
    hi = t;
    split(nodes_[t].left, fitness, insertion, lo, nodes_[t].left);
    pull(hi);
  }
}

std::uint32_t RankTreap::merge(std::uint32_t lo, std::uint32_t hi) {
  if (lo == npos) return hi;
  if (hi == npos) return lo;
  if (nodes_[lo].priority > nodes_[hi].priority) {
    nodes_[lo].right = merge(nodes_[lo].right, hi);
    pull(lo);
    return lo;
  }
  nodes_[hi].left = merge(lo, nodes_[hi].left);
  pull(hi);
  return hi;
}

void RankTreap::insert(double fitness, std::uint64_t insertion, std::uint32_t payload) {
  std::uint32_t idx;
  if (!free_.empty()) {
    idx = free_.back();
    free_.pop_back();
    nodes_[idx] = Node{fitness, insertion, priority_of(insertion), payload};
  } else {
    idx = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{fitness, insertion, priority_of(insertion), payload});
  }
  std::uint32_t lo, hi;
  split(root_, fitness, insertion, lo, hi);
  root_ = merge(merge(lo, idx), hi);
}

void RankTreap::erase(double fitness, std::uint64_t insertion) {
  // Isolate the single node with this key: keys are unique, and the successor
  // key boundary (fitness, insertion + 1) captures exactly [key, key].
  std::uint32_t lo, mid, hi;
  split(root_, fitness, insertion, lo, hi);
  split(hi, fitness, insertion + 1, mid, hi);
  if (mid == npos || nodes_[mid].count != 1) {
    root_ = merge(merge(lo, mid), hi);
    throw std::logic_error("RankTreap: erase of unknown key");
  }
  free_.push_back(mid);
  root_ = merge(lo, hi);
}

std::uint32_t RankTreap::find(double fitness, std::uint64_t insertion) const {
  std::uint32_t t = root_;
  while (t != npos) {
    const Node& n = nodes_[t];
    if (n.fitness == fitness && n.insertion == insertion) return t;
    t = key_less(t, fitness, insertion) ? n.right : n.left;
  }
  throw std::logic_error("RankTreap: key not found");
}

std::size_t RankTreap::rank(double fitness, std::uint64_t insertion) const {
  std::uint32_t t = root_;
  std::size_t before = 0;
  while (t != npos) {
    const Node& n = nodes_[t];
    if (n.fitness == fitness && n.insertion == insertion) {
      return before + count(n.left) + 1;
    }
    if (key_less(t, fitness, insertion)) {
      before += count(n.left) + 1;
      t = n.right;
    } else {
      t = n.left;
    }
  }
  throw std::logic_error("RankTreap: rank of unknown key");
}

std::uint32_t RankTreap::kth(std::size_t k) const {
  if (k == 0 || k > size()) throw std::out_of_range("RankTreap::kth: rank out of range");
  std::uint32_t t = root_;
  while (true) {
    const Node& n = nodes_[t];
    const std::size_t left = count(n.left);
    if (k <= left) {
      t = n.left;
    } else if (k == left + 1) {
      return n.payload;
    } else {
      k -= left + 1;
      t = n.right;
    }
  }
}

std::uint32_t RankTreap::worst() const { return kth(size()); }

void RankTreap::set_payload(double fitness, std::uint64_t insertion, std::uint32_t payload) {
  nodes_[find(fitness, insertion)].payload = payload;
}

}  // namespace detail

std::size_t PopulationStore::append(Individual ind) {
  const std::size_t pos = members_.size();
  view_.insert(ind.fitness, ind.insertion_index, static_cast<std::uint32_t>(pos));
  members_.push_back(std::move(ind));
  return pos;
}

void PopulationStore::replace(std::size_t slot, Individual ind) {
  if (mode_ != Mode::kSlots) throw std::logic_error("replace() requires slot mode");
  if (slot >= members_.size()) throw std::out_of_range("PopulationStore::replace: bad slot");
  Individual& old = members_[slot];
  view_.erase(old.fitness, old.insertion_index);
  view_.insert(ind.fitness, ind.insertion_index, static_cast<std::uint32_t>(slot));
  old = std::move(ind);
}

void PopulationStore::remove_worst() {
  if (mode_ != Mode::kSlots) throw std::logic_error("remove_worst() requires slot mode");
  if (members_.empty()) throw std::logic_error("remove_worst() on empty store");
  const std::size_t victim = view_.worst();
  view_.erase(members_[victim].fitness, members_[victim].insertion_index);
  const std::size_t last = members_.size() - 1;
  if (victim != last) {
    view_.set_payload(members_[last].fitness, members_[last].insertion_index,
                      static_cast<std::uint32_t>(victim));
    members_[victim] = std::move(members_[last]);
  }
  members_.pop_back();
}

std::size_t PopulationStore::rank_of(std::size_t index) const {
  if (index >= members_.size()) throw std::out_of_range("PopulationStore::rank_of: bad index");
  const Individual& m = members_[index];
  return view_.rank(m.fitness, m.insertion_index);
}

std::size_t PopulationStore::index_of_rank(std::size_t rank) const {
  if (rank == 0 || rank > members_.size()) {
    throw std::out_of_range("PopulationStore::index_of_rank: rank out of range");
  }
  return view_.kth(rank);
}

void Archive::add(Individual ind, RngStream& rng) {
  if (capacity_ == 0) return;
  if (members_.size() < capacity_) {
    members_.push_back(std::move(ind));
    return;
  }
  members_[static_cast<std::size_t>(rng.below(members_.size()))] = std::move(ind);
}

void Archive::set_capacity(std::size_t capacity, RngStream& rng) {
  capacity_ = capacity;
  while (members_.size() > capacity_) {
    const std::size_t victim = static_cast<std::size_t>(rng.below(members_.size()));
    members_[victim] = std::move(members_.back());
    members_.pop_back();
  }
}

}  // namespace ude
