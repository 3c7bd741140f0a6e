#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "scf/errors.hpp"
#include "scf/rng.hpp"

namespace scf {

// Rectifier hidden layers, one logistic output unit, inverted dropout on
// hidden activations during training.
struct MlpHead {
  std::vector<int> widths;  // input, hidden..., 1
  std::vector<std::vector<double>> w;  // per layer, out x in row-major
  std::vector<std::vector<double>> b;  // per layer
  double dropout = 0.0;

  int layers() const { return static_cast<int>(w.size()); }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (int l = 0; l < layers(); ++l) n += w[l].size() + b[l].size();
    return n;
  }

  void validate() const {
    if (widths.size() < 2 || widths.back() != 1)
      throw ConfigError("head needs widths input, hidden..., 1");
    for (int v : widths)
      if (v <= 0) throw ConfigError("head widths must be positive");
    if (dropout < 0.0 || dropout > 1.0)
      throw ConfigError("dropout must lie in [0, 1]");
  }
};

inline MlpHead make_mlp_head(int input_width, const std::vector<int>& hidden,
                             Rng& rng, double dropout = 0.0) {
  MlpHead h;
  h.widths.push_back(input_width);
  for (int v : hidden) h.widths.push_back(v);
  h.widths.push_back(1);
  h.dropout = dropout;
  h.validate();
  for (std::size_t l = 0; l + 1 < h.widths.size(); ++l) {
    int in = h.widths[l], out = h.widths[l + 1];
    double r = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-r, r);
    std::vector<double> wl(static_cast<std::size_t>(in) * out);
    for (double& x : wl) x = dist(rng);
    h.w.push_back(std::move(wl));
    h.b.push_back(std::vector<double>(static_cast<std::size_t>(out), 0.0));
  }
  return h;
}

struct MlpTrace {
  std::vector<std::vector<double>> x;  // input of each layer after dropout
  std::vector<std::vector<double>> pre;  // preactivation per layer
  std::vector<std::vector<double>> mask;  // dropout scale per hidden layer
  double prob = 0.0;
};

// Forward pass; a non-null rng enables training-mode dropout, otherwise the
// pass is deterministic inference.
inline MlpTrace mlp_forward_trace(const MlpHead& h,
                                  const std::vector<double>& input,
                                  Rng* dropout_rng = nullptr) {
  if (static_cast<int>(input.size()) != h.widths.front())
    throw ConfigError("head expects input width " +
                      std::to_string(h.widths.front()) + ", got " +
                      std::to_string(input.size()));
  MlpTrace t;
  std::vector<double> cur = input;
  for (int l = 0; l < h.layers(); ++l) {
    t.x.push_back(cur);
    int in = h.widths[static_cast<std::size_t>(l)];
    int out = h.widths[static_cast<std::size_t>(l) + 1];
    std::vector<double> pre(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
      const double* row =
          h.w[static_cast<std::size_t>(l)].data() +
          static_cast<std::size_t>(o) * in;
      double s = h.b[static_cast<std::size_t>(l)][static_cast<std::size_t>(o)];
      for (int i = 0; i < in; ++i) s += row[i] * cur[static_cast<std::size_t>(i)];
      pre[static_cast<std::size_t>(o)] = s;
    }
    t.pre.push_back(pre);
    if (l + 1 == h.layers()) {
      t.prob = 1.0 / (1.0 + std::exp(-pre[0]));
      break;
    }
    cur.assign(pre.begin(), pre.end());
    for (double& v : cur) v = v > 0.0 ? v : 0.0;
    std::vector<double> mask(cur.size(), 1.0);
    if (dropout_rng && h.dropout > 0.0) {
      double keep = 1.0 - h.dropout;
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        // keep <= 0 drops everything; no division by a zero keep rate
        mask[i] = (keep > 0.0 && unit(*dropout_rng) < keep) ? 1.0 / keep : 0.0;
        cur[i] *= mask[i];
      }
    }
    t.mask.push_back(std::move(mask));
  }
  return t;
}

inline double mlp_forward(const MlpHead& h, const std::vector<double>& input,
                          Rng* dropout_rng = nullptr) {
  return mlp_forward_trace(h, input, dropout_rng).prob;
}

inline constexpr double kProbClampLo = 1e-7;
inline constexpr double kProbClampHi = 1.0 - 1e-7;

inline double bce_loss(double prediction, int label) {
  double p = std::min(std::max(prediction, kProbClampLo), kProbClampHi);
  return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

// d(bce_loss(logistic(z), y))/dz. Zero in the clamp's flat region so the
// analytic value always matches the implemented loss.
inline double bce_logit_grad(double prediction, int label) {
  if (prediction <= kProbClampLo || prediction >= kProbClampHi) return 0.0;
  return prediction - static_cast<double>(label);
}

// Backward pass from dL/dlogit; writes parameter gradients layer by layer
// (weights then biases, in layer order) at grad_out and optionally returns
// dL/dinput.
inline void mlp_backward(const MlpHead& h, const MlpTrace& t, double dlogit,
                         double* grad_out,
                         std::vector<double>* dinput = nullptr) {
  std::vector<std::size_t> offsets(static_cast<std::size_t>(h.layers()));
  std::size_t off = 0;
  for (int l = 0; l < h.layers(); ++l) {
    offsets[static_cast<std::size_t>(l)] = off;
    off += h.w[static_cast<std::size_t>(l)].size() +
           h.b[static_cast<std::size_t>(l)].size();
  }
  std::vector<double> delta{dlogit};  // d L / d pre of current layer
  for (int l = h.layers() - 1; l >= 0; --l) {
    int in = h.widths[static_cast<std::size_t>(l)];
    int out = h.widths[static_cast<std::size_t>(l) + 1];
    const std::vector<double>& x = t.x[static_cast<std::size_t>(l)];
    double* gw = grad_out + offsets[static_cast<std::size_t>(l)];
    double* gb = gw + static_cast<std::size_t>(out) * in;
    std::vector<double> dx(static_cast<std::size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      double d = delta[static_cast<std::size_t>(o)];
      gb[o] += d;
      const double* row = h.w[static_cast<std::size_t>(l)].data() +
                          static_cast<std::size_t>(o) * in;
      double* grow = gw + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) {
        grow[i] += d * x[static_cast<std::size_t>(i)];
        dx[static_cast<std::size_t>(i)] += d * row[i];
      }
    }
    if (l == 0) {
      if (dinput) *dinput = std::move(dx);
      return;
    }
    // through the previous layer's dropout mask and rectifier
    const std::vector<double>& mask = t.mask[static_cast<std::size_t>(l - 1)];
    const std::vector<double>& pre = t.pre[static_cast<std::size_t>(l - 1)];
    delta.assign(dx.begin(), dx.end());
    for (std::size_t i = 0; i < delta.size(); ++i)
      delta[i] *= mask[i] * (pre[i] > 0.0 ? 1.0 : 0.0);
  }
}

}  // namespace scf
