#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ude/rng.hpp"

namespace ude {

// Thrown by Objective::evaluate once the evaluation budget is exhausted;
// engines plan partial generations so in normal operation this never fires,
// but the objective is the enforcement point of record.
struct BudgetExhausted : std::runtime_error {
  BudgetExhausted() : std::runtime_error("evaluation budget exhausted") {}
};

enum class FunctionId {
  sphere,
  rosenbrock,
  rastrigin,
  ackley,
  griewank,
  schwefel,
  happycat,
  expanded_schaffer_f6,
};

FunctionId function_from_name(const std::string& name);  // throws invalid_argument
std::string function_name(FunctionId id);

// Offset of the base function's optimum relative to the shift vector
// (rosenbrock's sits at all-ones, happycat's at all-minus-ones, the rest at 0).
double optimum_offset(FunctionId id);

struct ObjectiveSpec {
  FunctionId function = FunctionId::sphere;
  std::size_t dimension = 10;
  std::vector<double> lower;  // per-dimension, default -100
  std::vector<double> upper;  // per-dimension, default +100
  std::vector<double> shift;  // optimum location offset
  std::uint64_t budget = 10000;

  // Fills default bounds, draws the shift uniformly from [0.8*lower,
  // 0.8*upper] with the given seed, and validates invariants.
  static ObjectiveSpec make(FunctionId function, std::size_t dimension,
                            std::uint64_t budget, std::uint64_t shift_seed);

  void validate() const;  // throws invalid_argument on violation
};

// Budget-counting evaluator; one instance per trial.
class Objective {
 public:
  explicit Objective(ObjectiveSpec spec);

  double evaluate(const std::vector<double>& x);

  // Replaces the landscape with an arbitrary function of the raw genome while
  // keeping budget accounting and bounds untouched. Lets tests construct
  // pathological cases (e.g. landscapes where every offspring fails) that no
  // benchmark function produces.
  void set_function(std::function<double(const std::vector<double>&)> fn) {
    custom_ = std::move(fn);
  }

  const ObjectiveSpec& spec() const { return spec_; }
  std::uint64_t used() const { return used_; }
  std::uint64_t remaining() const { return spec_.budget - used_; }

 private:
  ObjectiveSpec spec_;
  std::uint64_t used_ = 0;
  std::vector<double> z_;  // scratch: x - shift
  std::function<double(const std::vector<double>&)> custom_;
};

// Value of the base function at z = x - shift (no counting, no bounds).
double base_function_value(FunctionId id, const std::vector<double>& z);

// n genomes i.i.d. uniform within the objective's box bounds.
std::vector<std::vector<double>> clamp_population_init(const ObjectiveSpec& spec,
                                                       RngStream& rng, std::size_t n);

}  // namespace ude
