#pragma once

#include <random>
#include <string>
#include <vector>

#include "scf/area.hpp"
#include "scf/convolution.hpp"
#include "scf/errors.hpp"
#include "scf/grid.hpp"
#include "scf/lateral.hpp"
#include "scf/rng.hpp"

namespace scf {

// One unimodal embedding vector presented to an upstream area. A zero
// vector stands for an absent modality.
struct Stimulus {
  std::string tag;
  std::vector<double> values;
};

using StimulusSet = std::vector<Stimulus>;

inline const Stimulus* find_stimulus(const StimulusSet& stimuli,
                                     const std::string& tag) {
  for (const Stimulus& s : stimuli)
    if (s.tag == tag) return &s;
  return nullptr;
}

// Projection from a D-dimensional stimulus to one scalar per neuron; row
// i*cols+j holds neuron (i,j)'s weight vector.
struct ReceptiveField {
  int dim = 0;
  std::vector<double> w;
  bool trainable = true;

  double* row(int n) { return w.data() + static_cast<std::size_t>(n) * dim; }
  const double* row(int n) const {
    return w.data() + static_cast<std::size_t>(n) * dim;
  }
};

inline ReceptiveField make_receptive_field(int rows, int cols, int dim,
                                           Rng& rng,
                                           double init_range = 0.05) {
  if (dim <= 0)
    throw ConfigError("receptive field dimension must be positive");
  ReceptiveField rf;
  rf.dim = dim;
  rf.w.resize(static_cast<std::size_t>(rows) * cols * dim);
  std::uniform_real_distribution<double> dist(-init_range, init_range);
  for (double& x : rf.w) x = dist(rng);
  return rf;
}

// Inner product of each neuron's weight row with the stimulus.
inline Grid external_stimulus(const ReceptiveField& rf,
                              const Stimulus& stimulus, int rows, int cols) {
  if (static_cast<int>(stimulus.values.size()) != rf.dim)
    throw InputError("stimulus \"" + stimulus.tag + "\" has dimension " +
                     std::to_string(stimulus.values.size()) +
                     ", receptive field expects " + std::to_string(rf.dim));
  Grid r(rows, cols);
  const std::size_t n_cells = r.size();
  for (std::size_t n = 0; n < n_cells; ++n) {
    const double* w = rf.row(static_cast<int>(n));
    double s = 0.0;
    for (int d = 0; d < rf.dim; ++d) s += w[d] * stimulus.values[d];
    r.values()[n] = s;
  }
  return r;
}

// Position-wise feedback from the multimodal area.
inline Grid feedback_input(double feedback_strength,
                           const AreaState& multimodal_state) {
  Grid f(multimodal_state.rows(), multimodal_state.cols());
  f.add_scaled(multimodal_state.activity, feedback_strength);
  return f;
}

struct UnimodalArea {
  std::string tag;  // modality tag matched against Stimulus::tag
  AreaParams params;
  AreaState state;
  LateralKernel kernel;
  ReceptiveField rf;
  double feedback = 1.0;  // F_s, multimodal activity fed back position-wise
  double gain = 10.0;     // k^s, projection strength into the multimodal area
};

struct MultimodalArea {
  AreaParams params;
  AreaState state;
  LateralKernel kernel;
};

// The full fusion layer: S upstream unimodal areas projecting into one
// downstream multimodal area whose settled activity is the fused embedding.
struct ScfModel {
  int steps = 15;
  ConvMode conv_mode = ConvMode::fast;
  std::vector<UnimodalArea> unimodal;
  MultimodalArea multimodal;

  int rows() const { return multimodal.state.rows(); }
  int cols() const { return multimodal.state.cols(); }

  void validate() const {
    if (unimodal.empty())
      throw ConfigError("model needs at least one unimodal area");
    if (steps < 0) throw ConfigError("steps must be nonnegative");
    multimodal.params.validate();
    const Grid& ref = multimodal.state.activity;
    if (!multimodal.kernel.weights.same_shape(ref))
      throw ConfigError("multimodal kernel shape differs from its area");
    for (const UnimodalArea& a : unimodal) {
      a.params.validate();
      if (!a.state.activity.same_shape(ref))
        throw ConfigError("area \"" + a.tag +
                          "\" shape differs from the multimodal area");
      if (!a.kernel.weights.same_shape(ref))
        throw ConfigError("area \"" + a.tag +
                          "\" kernel shape differs from its area");
      if (static_cast<int>(a.rf.w.size()) !=
          ref.rows() * ref.cols() * a.rf.dim)
        throw ConfigError("area \"" + a.tag +
                          "\" receptive field row count differs from N*M");
    }
  }

  void reset_activity() {
    for (UnimodalArea& a : unimodal) a.state.activity.fill(0.0);
    multimodal.state.activity.fill(0.0);
  }
};

// Index convention for composite_input: 0..S-1 name the unimodal areas in
// model order, S names the multimodal area.
inline int multimodal_index(const ScfModel& m) {
  return static_cast<int>(m.unimodal.size());
}

inline Grid composite_input(const ScfModel& m, int area,
                            const StimulusSet& stimuli) {
  if (area == multimodal_index(m)) {
    Grid u = lateral_input(m.multimodal.state, m.multimodal.kernel,
                           m.conv_mode);
    for (const UnimodalArea& a : m.unimodal)
      u.add_scaled(a.state.activity, a.gain);
    return u;
  }
  const UnimodalArea& a = m.unimodal[static_cast<std::size_t>(area)];
  Grid u = lateral_input(a.state, a.kernel, m.conv_mode);
  if (const Stimulus* s = find_stimulus(stimuli, a.tag))
    u += external_stimulus(a.rf, *s, m.rows(), m.cols());
  u.add_scaled(m.multimodal.state.activity, a.feedback);
  return u;
}

namespace detail {

inline double advance_value(double z, double act, const AreaParams& p) {
  return ((p.tau - 1.0) * z + act) * (1.0 / p.tau);
}

inline void advance_activity(AreaState& state, const AreaParams& p,
                             const Grid& u) {
  for (std::size_t t = 0; t < state.activity.size(); ++t)
    state.activity.values()[t] = advance_value(
        state.activity.values()[t], activation(u.values()[t], p), p);
}

}  // namespace detail

// One synchronous update: every composite input is computed from the
// current activities before any area advances.
inline void step(ScfModel& m, const StimulusSet& stimuli) {
  std::vector<Grid> inputs;
  inputs.reserve(m.unimodal.size() + 1);
  for (int s = 0; s < static_cast<int>(m.unimodal.size()); ++s)
    inputs.push_back(composite_input(m, s, stimuli));
  inputs.push_back(composite_input(m, multimodal_index(m), stimuli));
  for (std::size_t s = 0; s < m.unimodal.size(); ++s)
    detail::advance_activity(m.unimodal[s].state, m.unimodal[s].params,
                             inputs[s]);
  detail::advance_activity(m.multimodal.state, m.multimodal.params,
                           inputs.back());
}

// Runs the dynamics for the configured number of steps from the zero
// resting state with stimuli clamped, and reads out the multimodal
// activity row-major as the fused embedding.
inline std::vector<double> run_forward(ScfModel& m,
                                       const StimulusSet& stimuli) {
  m.reset_activity();
  for (int t = 0; t < m.steps; ++t) step(m, stimuli);
  return m.multimodal.state.activity.values();
}

}  // namespace scf
