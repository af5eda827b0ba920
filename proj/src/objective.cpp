#include "ude/objective.hpp"

#include <cmath>

namespace ude {

namespace {

constexpr double kPi = 3.141592653589793;

// Translated Schwefel landscape: g's global maximum sits at kSchwefelY, so
// f(z) = sum(g(Y) - g(z_i + Y)) has its optimum exactly at z = 0 while the
// deceptive asymmetric structure survives inside the [-100, 100] box (the
// nearest competing basin of g lies at |z| ~ 139, outside it).
constexpr double kSchwefelY = 420.9687462275036;

double schwefel_g(double y) { return y * std::sin(std::sqrt(std::fabs(y))); }

double sphere(const std::vector<double>& z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return s;
}

double rosenbrock(const std::vector<double>& z) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double a = z[i + 1] - z[i] * z[i];
    const double b = z[i] - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return s;
}

double rastrigin(const std::vector<double>& z) {
  double s = 0.0;
  for (double v : z) s += v * v - 10.0 * std::cos(2.0 * kPi * v) + 10.0;
  return s;
}

double ackley(const std::vector<double>& z) {
  const double n = static_cast<double>(z.size());
  double sq = 0.0, cs = 0.0;
  for (double v : z) {
    sq += v * v;
    cs += std::cos(2.0 * kPi * v);
  }
  // The constant e is written through the same exp() used for the cosine
  // term, and each cancelling pair is grouped, so the optimum evaluates to
  // exactly 0.0 instead of leaving a one-ulp residue.
  return (20.0 - 20.0 * std::exp(-0.2 * std::sqrt(sq / n))) +
         (std::exp(1.0) - std::exp(cs / n));
}

double griewank(const std::vector<double>& z) {
  double s = 0.0, p = 1.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    s += z[i] * z[i] / 4000.0;
    p *= std::cos(z[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return s - p + 1.0;
}

double schwefel(const std::vector<double>& z) {
  const double peak = schwefel_g(kSchwefelY);
  double s = 0.0;
  for (double v : z) s += peak - schwefel_g(v + kSchwefelY);
  return s;
}

double happycat(const std::vector<double>& z) {
  const double n = static_cast<double>(z.size());
  double sq = 0.0, sum = 0.0;
  for (double v : z) {
    sq += v * v;
    sum += v;
  }
  const double d = sq - n;
  return std::pow(d * d, 0.125) + (0.5 * sq + sum) / n + 0.5;
}

double schaffer_f6(double a, double b) {
  const double r2 = a * a + b * b;
  const double s = std::sin(std::sqrt(r2));
  const double den = 1.0 + 0.001 * r2;
  return 0.5 + (s * s - 0.5) / (den * den);
}

double expanded_schaffer_f6(const std::vector<double>& z) {
  double s = 0.0;
  const std::size_t n = z.size();
  for (std::size_t i = 0; i < n; ++i) s += schaffer_f6(z[i], z[(i + 1) % n]);
  return s;
}

}  // namespace

FunctionId function_from_name(const std::string& name) {
  if (name == "sphere") return FunctionId::sphere;
  if (name == "rosenbrock") return FunctionId::rosenbrock;
  if (name == "rastrigin") return FunctionId::rastrigin;
  if (name == "ackley") return FunctionId::ackley;
  if (name == "griewank") return FunctionId::griewank;
  if (name == "schwefel") return FunctionId::schwefel;
  if (name == "happycat") return FunctionId::happycat;
  if (name == "expanded_schaffer_f6" || name == "schaffer") {
    return FunctionId::expanded_schaffer_f6;
  }
  throw std::invalid_argument("unknown objective function: " + name);
}

std::string function_name(FunctionId id) {
  switch (id) {
    case FunctionId::sphere: return "sphere";
    case FunctionId::rosenbrock: return "rosenbrock";
    case FunctionId::rastrigin: return "rastrigin";
    case FunctionId::ackley: return "ackley";
    case FunctionId::griewank: return "griewank";
    case FunctionId::schwefel: return "schwefel";
    case FunctionId::happycat: return "happycat";
    case FunctionId::expanded_schaffer_f6: return "expanded_schaffer_f6";
  }
  throw std::logic_error("unreachable");
}

double optimum_offset(FunctionId id) {
  switch (id) {
    case FunctionId::rosenbrock: return 1.0;
    case FunctionId::happycat: return -1.0;
    default: return 0.0;
  }
}

double base_function_value(FunctionId id, const std::vector<double>& z) {
  switch (id) {
    case FunctionId::sphere: return sphere(z);
    case FunctionId::rosenbrock: return rosenbrock(z);
    case FunctionId::rastrigin: return rastrigin(z);
    case FunctionId::ackley: return ackley(z);
    case FunctionId::griewank: return griewank(z);
    case FunctionId::schwefel: return schwefel(z);
    case FunctionId::happycat: return happycat(z);
    case FunctionId::expanded_schaffer_f6: return expanded_schaffer_f6(z);
  }
  throw std::logic_error("unreachable");
}

ObjectiveSpec ObjectiveSpec::make(FunctionId function, std::size_t dimension,
                                  std::uint64_t budget, std::uint64_t shift_seed) {
  ObjectiveSpec spec;
  spec.function = function;
  spec.dimension = dimension;
  spec.budget = budget;
  spec.lower.assign(dimension, -100.0);
  spec.upper.assign(dimension, 100.0);
  spec.shift.resize(dimension);
  RngStream rng(shift_seed, static_cast<std::uint64_t>(StreamId::shift));
  for (std::size_t j = 0; j < dimension; ++j) {
    spec.shift[j] = rng.uniform(0.8 * spec.lower[j], 0.8 * spec.upper[j]);
  }
  spec.validate();
  return spec;
}

void ObjectiveSpec::validate() const {
  if (dimension < 2) throw std::invalid_argument("objective dimension must be >= 2");
  if (lower.size() != dimension || upper.size() != dimension || shift.size() != dimension) {
    throw std::invalid_argument("objective bound/shift lengths must equal dimension");
  }
  if (budget == 0) throw std::invalid_argument("objective budget must be positive");
  const double off = optimum_offset(function);
  for (std::size_t j = 0; j < dimension; ++j) {
    if (!(lower[j] < upper[j])) {
      throw std::invalid_argument("objective bounds must satisfy lower < upper");
    }
    if (!(shift[j] > lower[j] && shift[j] < upper[j])) {
      throw std::invalid_argument("objective shift must lie strictly inside bounds");
    }
    const double opt = shift[j] + off;
    if (!(opt > lower[j] && opt < upper[j])) {
      throw std::invalid_argument("objective optimum must lie strictly inside bounds");
    }
  }
}

Objective::Objective(ObjectiveSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  z_.resize(spec_.dimension);
}

double Objective::evaluate(const std::vector<double>& x) {
  if (x.size() != spec_.dimension) {
    throw std::invalid_argument("evaluate: genome length != dimension");
  }
  if (used_ >= spec_.budget) throw BudgetExhausted{};
  ++used_;
  double f;
  if (custom_) {
    f = custom_(x);
  } else {
    for (std::size_t j = 0; j < spec_.dimension; ++j) z_[j] = x[j] - spec_.shift[j];
    f = base_function_value(spec_.function, z_);
  }
  if (!std::isfinite(f)) throw std::runtime_error("objective produced non-finite value");
  return f;
}

std::vector<std::vector<double>> clamp_population_init(const ObjectiveSpec& spec,
                                                       RngStream& rng, std::size_t n) {
  if (n < 4) throw std::invalid_argument("initial population must have n >= 4");
  std::vector<std::vector<double>> out(n, std::vector<double>(spec.dimension));
  for (auto& genome : out) {
    for (std::size_t j = 0; j < spec.dimension; ++j) {
      genome[j] = rng.uniform(spec.lower[j], spec.upper[j]);
    }
  }
  return out;
}

}  // namespace ude
