#pragma once

#include <cmath>
#include <vector>

#include "scf/convolution.hpp"
#include "scf/grid.hpp"
#include "scf/model.hpp"
#include "scf/params.hpp"

// Reverse-mode differentiation through the T unrolled dynamics steps. The
// forward trace keeps every activity, composite input, and activation; the
// backward pass walks them in reverse, exploiting that the lateral kernel
// is point-symmetric so the adjoint of convolving with it is convolving
// with it again.

namespace scf {

struct AreaTrace {
  std::vector<Grid> z;    // activities, steps+1 entries
  std::vector<Grid> u;    // composite inputs, steps entries
  std::vector<Grid> act;  // activations, steps entries
};

struct ForwardTrace {
  std::vector<AreaTrace> uni;
  AreaTrace multi;
  std::vector<Grid> r;  // constant external stimulus grid per unimodal area
};

inline ForwardTrace scf_forward_trace(const ScfModel& m,
                                      const StimulusSet& stimuli) {
  const int rows = m.rows(), cols = m.cols();
  const std::size_t S = m.unimodal.size();
  ForwardTrace t;
  t.uni.resize(S);
  t.r.reserve(S);
  for (std::size_t s = 0; s < S; ++s) {
    if (const Stimulus* st = find_stimulus(stimuli, m.unimodal[s].tag))
      t.r.push_back(external_stimulus(m.unimodal[s].rf, *st, rows, cols));
    else
      t.r.push_back(Grid(rows, cols));
    t.uni[s].z.push_back(Grid(rows, cols));
  }
  t.multi.z.push_back(Grid(rows, cols));

  for (int n = 0; n < m.steps; ++n) {
    // composite inputs from step-n activities, mirroring composite_input
    for (std::size_t s = 0; s < S; ++s) {
      const UnimodalArea& a = m.unimodal[s];
      Grid u = circular_convolve(a.kernel, t.uni[s].z.back(), m.conv_mode);
      u += t.r[s];
      u.add_scaled(t.multi.z.back(), a.feedback);
      t.uni[s].u.push_back(std::move(u));
    }
    {
      Grid u = circular_convolve(m.multimodal.kernel, t.multi.z.back(),
                                 m.conv_mode);
      for (std::size_t s = 0; s < S; ++s)
        u.add_scaled(t.uni[s].z.back(), m.unimodal[s].gain);
      t.multi.u.push_back(std::move(u));
    }
    auto advance = [](AreaTrace& at, const AreaParams& p) {
      const Grid& u = at.u.back();
      const Grid& z = at.z.back();
      Grid act(u.rows(), u.cols());
      Grid znext(u.rows(), u.cols());
      for (std::size_t c = 0; c < u.size(); ++c) {
        act.values()[c] = activation(u.values()[c], p);
        znext.values()[c] =
            detail::advance_value(z.values()[c], act.values()[c], p);
      }
      at.act.push_back(std::move(act));
      at.z.push_back(std::move(znext));
    };
    for (std::size_t s = 0; s < S; ++s)
      advance(t.uni[s], m.unimodal[s].params);
    advance(t.multi, m.multimodal.params);
  }
  return t;
}

// The fused embedding of a completed trace.
inline const std::vector<double>& fused_embedding(const ForwardTrace& t) {
  return t.multi.z.back().values();
}

// Evaluation-only forward pass; the model is shared read-only.
inline std::vector<double> fused_forward(const ScfModel& m,
                                         const StimulusSet& stimuli) {
  return scf_forward_trace(m, stimuli).multi.z.back().values();
}

namespace detail {

inline Grid reflected(const Grid& g) {
  Grid out(g.rows(), g.cols());
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) out(i, j) = g.at_wrapped(-i, -j);
  return out;
}

// d kernel_weight / d (l_ex, sigma_ex, l_in, sigma_in) contracted with a
// kernel-shaped gradient grid.
inline void chain_lateral(const Grid& g_kernel, const AreaParams& p,
                          double* out4) {
  const int rows = g_kernel.rows(), cols = g_kernel.cols();
  for (int a = 0; a < rows; ++a)
    for (int b = 0; b < cols; ++b) {
      double dx = circular_distance(a, 0, rows);
      double dy = circular_distance(b, 0, cols);
      double d2 = dx * dx + dy * dy;
      double e = std::exp(-d2 / (2.0 * p.sigma_ex * p.sigma_ex));
      double i = std::exp(-d2 / (2.0 * p.sigma_in * p.sigma_in));
      double g = g_kernel(a, b);
      out4[0] += g * e;
      out4[1] += g * p.l_ex * e * d2 /
                 (p.sigma_ex * p.sigma_ex * p.sigma_ex);
      out4[2] -= g * i;
      out4[3] -= g * p.l_in * i * d2 /
                 (p.sigma_in * p.sigma_in * p.sigma_in);
    }
}

inline double dot_grids(const Grid& a, const Grid& b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c)
    s += a.values()[c] * b.values()[c];
  return s;
}

}  // namespace detail

// Accumulates d loss / d (trainable model parameters) into the flat
// gradient, given d loss / d fused-embedding as a grid. Head gradients are
// not touched here.
inline void scf_backward(const ScfModel& m, const TrainablePlan& plan,
                         const ForwardTrace& t, const StimulusSet& stimuli,
                         const Grid& d_embedding, std::vector<double>& grad) {
  const std::size_t S = m.unimodal.size();
  const int rows = m.rows(), cols = m.cols();
  const int T = m.steps;

  std::vector<Grid> delta_uni(S, Grid(rows, cols));
  Grid delta_multi = d_embedding;

  std::vector<Grid> g_r(S, Grid(rows, cols));  // sum of w_s over steps
  std::vector<Grid> g_kernel;                  // per area + multimodal
  if (plan.groups.lateral)
    g_kernel.assign(S + 1, Grid(rows, cols));
  std::vector<double> g_gain(S, 0.0), g_feedback(S, 0.0);
  std::vector<double> g_tau(S + 1, 0.0), g_theta(S + 1, 0.0),
      g_slope(S + 1, 0.0);

  std::vector<Grid> w_uni(S, Grid(rows, cols));
  Grid w_multi(rows, cols);

  for (int n = T - 1; n >= 0; --n) {
    // dL/du for every area from dL/dz[n+1]
    auto input_grad = [&](const AreaTrace& at, const Grid& delta,
                          const AreaParams& p, std::size_t area_idx,
                          Grid& w_out) {
      const Grid& a = at.act[static_cast<std::size_t>(n)];
      const bool track_area = plan.area_offset[area_idx] != kNoSegment;
      double sum_w = 0.0, sum_p = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) {
        double phi = a.values()[c] * (1.0 - a.values()[c]);
        double base = delta.values()[c] * phi / p.tau;
        w_out.values()[c] = p.slope * base;
        if (track_area) {
          sum_w += w_out.values()[c];
          sum_p += base * (at.u[static_cast<std::size_t>(n)].values()[c] -
                           p.theta);
        }
      }
      if (track_area) {
        g_theta[area_idx] -= sum_w;
        g_slope[area_idx] += sum_p;
        double s_tau = 0.0;
        const Grid& zn = at.z[static_cast<std::size_t>(n)];
        const Grid& zn1 = at.z[static_cast<std::size_t>(n) + 1];
        for (std::size_t c = 0; c < zn.size(); ++c)
          s_tau += delta.values()[c] *
                   (zn.values()[c] - zn1.values()[c]) / p.tau;
        g_tau[area_idx] += s_tau;
      }
    };
    for (std::size_t s = 0; s < S; ++s)
      input_grad(t.uni[s], delta_uni[s], m.unimodal[s].params, s, w_uni[s]);
    input_grad(t.multi, delta_multi, m.multimodal.params, S, w_multi);

    // parameter contributions at this step
    for (std::size_t s = 0; s < S; ++s) {
      if (plan.rf_offset[s] != kNoSegment) g_r[s] += w_uni[s];
      if (plan.feedback_offset[s] != kNoSegment)
        g_feedback[s] += detail::dot_grids(
            w_uni[s], t.multi.z[static_cast<std::size_t>(n)]);
      if (plan.gain_offset[s] != kNoSegment)
        g_gain[s] += detail::dot_grids(
            w_multi, t.uni[s].z[static_cast<std::size_t>(n)]);
      if (plan.groups.lateral)
        g_kernel[s] += circular_convolve_grids(
            w_uni[s],
            detail::reflected(t.uni[s].z[static_cast<std::size_t>(n)]),
            m.conv_mode);
    }
    if (plan.groups.lateral)
      g_kernel[S] += circular_convolve_grids(
          w_multi, detail::reflected(t.multi.z[static_cast<std::size_t>(n)]),
          m.conv_mode);

    // dL/dz[n] for every area
    Grid next_multi = circular_convolve(m.multimodal.kernel, w_multi,
                                        m.conv_mode);
    next_multi.add_scaled(delta_multi, (m.multimodal.params.tau - 1.0) /
                                           m.multimodal.params.tau);
    for (std::size_t s = 0; s < S; ++s) {
      next_multi.add_scaled(w_uni[s], m.unimodal[s].feedback);
      Grid next = circular_convolve(m.unimodal[s].kernel, w_uni[s],
                                    m.conv_mode);
      next.add_scaled(delta_uni[s], (m.unimodal[s].params.tau - 1.0) /
                                        m.unimodal[s].params.tau);
      next.add_scaled(w_multi, m.unimodal[s].gain);
      delta_uni[s] = std::move(next);
    }
    delta_multi = std::move(next_multi);
  }

  // fold accumulators into the flat gradient
  for (std::size_t s = 0; s < S; ++s) {
    if (plan.rf_offset[s] != kNoSegment) {
      const Stimulus* st = find_stimulus(stimuli, m.unimodal[s].tag);
      if (st) {
        const int dim = m.unimodal[s].rf.dim;
        double* g = grad.data() + plan.rf_offset[s];
        for (std::size_t c = 0; c < g_r[s].size(); ++c) {
          double gc = g_r[s].values()[c];
          if (gc == 0.0) continue;
          double* row = g + c * static_cast<std::size_t>(dim);
          for (int d = 0; d < dim; ++d)
            row[d] += gc * st->values[static_cast<std::size_t>(d)];
        }
      }
    }
    if (plan.gain_offset[s] != kNoSegment)
      grad[plan.gain_offset[s]] += g_gain[s];
    if (plan.feedback_offset[s] != kNoSegment)
      grad[plan.feedback_offset[s]] += g_feedback[s];
    if (plan.lateral_offset[s] != kNoSegment)
      detail::chain_lateral(g_kernel[s], m.unimodal[s].params,
                            grad.data() + plan.lateral_offset[s]);
    if (plan.area_offset[s] != kNoSegment) {
      grad[plan.area_offset[s]] += g_tau[s];
      grad[plan.area_offset[s] + 1] += g_theta[s];
      grad[plan.area_offset[s] + 2] += g_slope[s];
    }
  }
  if (plan.lateral_offset[S] != kNoSegment)
    detail::chain_lateral(g_kernel[S], m.multimodal.params,
                          grad.data() + plan.lateral_offset[S]);
  if (plan.area_offset[S] != kNoSegment) {
    grad[plan.area_offset[S]] += g_tau[S];
    grad[plan.area_offset[S] + 1] += g_theta[S];
    grad[plan.area_offset[S] + 2] += g_slope[S];
  }
}

}  // namespace scf
