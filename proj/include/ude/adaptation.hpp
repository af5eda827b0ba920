#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ude/rng.hpp"

namespace ude {

// Sampling widths and floors for the success-history samplers.
struct AdaptationParams {
  double gamma_F = 0.1;  // Cauchy scale for F
  double sigma_C = 0.1;  // normal stddev for C
  double sigma_T = 10.0; // normal stddev for T
  double T_min = 100.0;  // hard floor for sampled T
};

// Circular memories of recent successful parameter means. m_t is empty for
// engines that do not adapt the tournament divisor.
struct SuccessHistory {
  std::vector<double> m_f;
  std::vector<double> m_c;
  std::vector<double> m_t;
  std::size_t cursor = 0;

  // H slots, F/C memories at 0.5. When with_t, T memory starts at
  // max(T_min, t_init): the floor invariant wins over a smaller initial
  // population (only reachable at dimensions below the usual scale).
  static SuccessHistory make(std::size_t H, bool with_t = false, double t_init = 0.0,
                             double t_min = 100.0);

  std::size_t length() const { return m_f.size(); }
  bool adapts_t() const { return !m_t.empty(); }
};

// Per-generation lists of successful parameters and their improvements.
// Entries are added only for strict improvements (ties have zero weight and
// would contribute nothing to the weighted means).
struct SuccessSets {
  std::vector<double> f;
  std::vector<double> c;
  std::vector<double> t;
  std::vector<double> delta;

  bool empty() const { return delta.empty(); }
  void clear();
  void add(double F, double C, double delta_f);
  void add(double F, double C, double T, double delta_f);
};

// Weighted Lehmer mean: sum(w*x^2) / sum(w*x). Inputs positive, non-empty.
double lehmer_mean(std::span<const double> values, std::span<const double> weights);

// One memory slot index shared by this offspring's F, C (and T) draws.
std::size_t draw_slot(const SuccessHistory& history, RngStream& rng);

// F ~ Cauchy(m_f[slot], gamma_F); > 1 clips to 1, <= 0 redraws.
double sample_f_at(const SuccessHistory& history, std::size_t slot, RngStream& rng,
                   const AdaptationParams& params);
// C ~ normal(m_c[slot], sigma_C) clamped into [0, 1].
double sample_c_at(const SuccessHistory& history, std::size_t slot, RngStream& rng,
                   const AdaptationParams& params);
// T ~ normal(m_t[slot], sigma_T) floored at T_min, unbounded above.
double sample_t_at(const SuccessHistory& history, std::size_t slot, RngStream& rng,
                   const AdaptationParams& params);

// Convenience single-draw forms (slot drawn internally).
double sample_f(const SuccessHistory& history, RngStream& rng,
                const AdaptationParams& params = {});
double sample_c(const SuccessHistory& history, RngStream& rng,
                const AdaptationParams& params = {});
double sample_t(const SuccessHistory& history, RngStream& rng,
                const AdaptationParams& params = {});

// End-of-generation update: with non-empty sets, the cursor slot receives the
// improvement-weighted Lehmer means and the cursor advances modulo H; with
// empty sets the history is left bit-identical.
void update_history(SuccessHistory& history, const SuccessSets& sets);

}  // namespace ude
