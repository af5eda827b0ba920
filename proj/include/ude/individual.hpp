#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace ude {

// One candidate solution plus the bookkeeping the engines and the lineage
// analysis need. insertion_index is a global, monotonically increasing stamp;
// it never changes once assigned and breaks all fitness ties deterministically.
struct Individual {
  std::vector<double> genome;
  double fitness = 0.0;
  std::uint64_t insertion_index = 0;
  std::optional<std::uint64_t> parent_index;  // empty for initial members
  bool successful = true;  // offspring: f(u) <= f(parent); initial members: true
};

// Strict total order "a is fitter than b" (minimisation, earlier insertion
// wins ties). Every ranked structure in the project uses exactly this order.
inline bool fitter(double fa, std::uint64_t ia, double fb, std::uint64_t ib) {
  if (fa != fb) return fa < fb;
  return ia < ib;
}

inline bool fitter(const Individual& a, const Individual& b) {
  return fitter(a.fitness, a.insertion_index, b.fitness, b.insertion_index);
}

}  // namespace ude
