#include "ude/variation.hpp"

#include <stdexcept>

namespace ude {

namespace {
void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("genome length mismatch");
}
}  // namespace

std::vector<double> rand1(const std::vector<double>& x_r1, const std::vector<double>& x_r2,
                          const std::vector<double>& x_r3, double F) {
  require_same_length(x_r1.size(), x_r2.size());
  require_same_length(x_r1.size(), x_r3.size());
  std::vector<double> v(x_r1.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = x_r1[j] + F * (x_r2[j] - x_r3[j]);
  }
  return v;
}

std::vector<double> current_to_pbest(const std::vector<double>& x_p,
                                     const std::vector<double>& x_pbest,
                                     const std::vector<double>& x_r1,
                                     const std::vector<double>& x_r2, double F) {
  require_same_length(x_p.size(), x_pbest.size());
  require_same_length(x_p.size(), x_r1.size());
  require_same_length(x_p.size(), x_r2.size());
  std::vector<double> v(x_p.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = x_p[j] + F * (x_pbest[j] - x_p[j]) + F * (x_r1[j] - x_r2[j]);
  }
  return v;
}

std::vector<double> binomial_crossover(const std::vector<double>& parent,
                                       const std::vector<double>& mutant, double C,
                                       RngStream& rng) {
  require_same_length(parent.size(), mutant.size());
  const std::size_t d = parent.size();
  const std::size_t j_rand = static_cast<std::size_t>(rng.below(d));
  std::vector<double> u(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double r = rng.uniform01();
    u[j] = (r <= C || j == j_rand) ? mutant[j] : parent[j];
  }
  return u;
}

std::vector<double> repair_bounds(std::vector<double> offspring,
                                  const std::vector<double>& parent,
                                  const ObjectiveSpec& spec) {
  require_same_length(offspring.size(), parent.size());
  require_same_length(offspring.size(), spec.dimension);
  for (std::size_t j = 0; j < offspring.size(); ++j) {
    if (offspring[j] < spec.lower[j]) {
      offspring[j] = 0.5 * (parent[j] + spec.lower[j]);
    } else if (offspring[j] > spec.upper[j]) {
      offspring[j] = 0.5 * (parent[j] + spec.upper[j]);
    }
  }
  return offspring;
}

}  // namespace ude
