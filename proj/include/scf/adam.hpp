#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "scf/errors.hpp"

namespace scf {

struct AdamParams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (!(beta1 > 0.0 && beta1 < 1.0))
      throw ConfigError("beta1 must lie strictly between 0 and 1");
    if (!(beta2 > 0.0 && beta2 < 1.0))
      throw ConfigError("beta2 must lie strictly between 0 and 1");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  }
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// Standard bias-corrected update: theta -= lr * m_hat / (sqrt(v_hat) + eps).
inline void adam_update(std::vector<double>& params,
                        const std::vector<double>& grads, AdamState& state,
                        const AdamParams& cfg) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw ConfigError("optimizer state size differs from parameter count");
  state.t += 1;
  double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    double mhat = state.m[i] / c1;
    double vhat = state.v[i] / c2;
    params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

}  // namespace scf
