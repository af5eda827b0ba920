#include "ude/adaptation.hpp"

#include <algorithm>
#include <stdexcept>

namespace ude {

SuccessHistory SuccessHistory::make(std::size_t H, bool with_t, double t_init,
                                    double t_min) {
  if (H == 0) throw std::invalid_argument("SuccessHistory: H must be >= 1");
  SuccessHistory h;
  h.m_f.assign(H, 0.5);
  h.m_c.assign(H, 0.5);
  if (with_t) h.m_t.assign(H, std::max(t_min, t_init));
  return h;
}

void SuccessSets::clear() {
  f.clear();
  c.clear();
  t.clear();
  delta.clear();
}

void SuccessSets::add(double F, double C, double delta_f) {
  f.push_back(F);
  c.push_back(C);
  delta.push_back(delta_f);
}

void SuccessSets::add(double F, double C, double T, double delta_f) {
  add(F, C, delta_f);
  t.push_back(T);
}

double lehmer_mean(std::span<const double> values, std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size()) {
    throw std::invalid_argument("lehmer_mean: non-empty, equal-length inputs required");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += weights[i] * values[i] * values[i];
    den += weights[i] * values[i];
  }
  return num / den;
}

std::size_t draw_slot(const SuccessHistory& history, RngStream& rng) {
  return static_cast<std::size_t>(rng.below(history.length()));
}

double sample_f_at(const SuccessHistory& history, std::size_t slot, RngStream& rng,
                   const AdaptationParams& params) {
  while (true) {
    const double f = rng.cauchy(history.m_f[slot], params.gamma_F);
    if (f > 1.0) return 1.0;
    if (f > 0.0) return f;
    // f <= 0: redraw (terminates with probability 1).
  }
}

double sample_c_at(const SuccessHistory& history, std::size_t slot, RngStream& rng,
                   const AdaptationParams& params) {
  const double c = rng.normal(history.m_c[slot], params.sigma_C);
  return std::clamp(c, 0.0, 1.0);
}

double sample_t_at(const SuccessHistory& history, std::size_t slot, RngStream& rng,
                   const AdaptationParams& params) {
  if (!history.adapts_t()) throw std::logic_error("sample_t on a history without m_t");
  const double t = rng.normal(history.m_t[slot], params.sigma_T);
  return std::max(t, params.T_min);
}

double sample_f(const SuccessHistory& history, RngStream& rng,
                const AdaptationParams& params) {
  return sample_f_at(history, draw_slot(history, rng), rng, params);
}

double sample_c(const SuccessHistory& history, RngStream& rng,
                const AdaptationParams& params) {
  return sample_c_at(history, draw_slot(history, rng), rng, params);
}

double sample_t(const SuccessHistory& history, RngStream& rng,
                const AdaptationParams& params) {
  return sample_t_at(history, draw_slot(history, rng), rng, params);
}

namespace {
// S_C may legitimately contain exact zeros (clamped normal draws that still
// succeeded); when every entry is zero the Lehmer ratio degenerates to 0/0,
// and its limit — also the only value consistent with the data — is 0.
double lehmer_mean_allowing_zeros(std::span<const double> values,
                                  std::span<const double> weights) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += weights[i] * values[i] * values[i];
    den += weights[i] * values[i];
  }
  return den == 0.0 ? 0.0 : num / den;
}
}  // namespace

void update_history(SuccessHistory& history, const SuccessSets& sets) {
  if (sets.empty()) return;  // cursor also stays put
  const std::size_t k = history.cursor;
  history.m_f[k] = lehmer_mean(sets.f, sets.delta);
  history.m_c[k] = lehmer_mean_allowing_zeros(sets.c, sets.delta);
  if (history.adapts_t()) {
    if (sets.t.size() != sets.delta.size()) {
      throw std::logic_error("update_history: T entries missing from success sets");
    }
    history.m_t[k] = lehmer_mean(sets.t, sets.delta);
  }
  history.cursor = (k + 1) % history.length();
}

}  // namespace ude
