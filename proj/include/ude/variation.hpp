#pragma once

#include <vector>

#include "ude/objective.hpp"
#include "ude/rng.hpp"

namespace ude {

// v = x_r1 + F * (x_r2 - x_r3).
std::vector<double> rand1(const std::vector<double>& x_r1, const std::vector<double>& x_r2,
                          const std::vector<double>& x_r3, double F);

// v = x_p + F * (x_pbest - x_p) + F * (x_r1 - x_r2).
std::vector<double> current_to_pbest(const std::vector<double>& x_p,
                                     const std::vector<double>& x_pbest,
                                     const std::vector<double>& x_r1,
                                     const std::vector<double>& x_r2, double F);

// Binomial crossover: offspring[j] = mutant[j] when u <= C or j == j_rand,
// else parent[j]. j_rand is drawn first, then one uniform per dimension in
// dimension order, so the draw schedule is reproducible.
std::vector<double> binomial_crossover(const std::vector<double>& parent,
                                       const std::vector<double>& mutant, double C,
                                       RngStream& rng);

// Midpoint repair toward the violated bound: out-of-bounds coordinates become
// (parent[j] + bound[j]) / 2. Requires an in-bounds parent; idempotent.
std::vector<double> repair_bounds(std::vector<double> offspring,
                                  const std::vector<double>& parent,
                                  const ObjectiveSpec& spec);

}  // namespace ude
