#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "scf/errors.hpp"
#include "scf/mlp.hpp"
#include "scf/model.hpp"

namespace scf {

// Which parameter groups the optimizer may touch. Receptive fields follow
// the default-trainable convention; everything else is opt-in. The head is
// always trainable.
struct TrainableGroups {
  bool receptive_fields = true;
  bool gains = false;
  bool feedbacks = false;
  bool lateral = false;  // l_ex, sigma_ex, l_in, sigma_in per area
  bool area = false;     // tau, theta, slope per area
};

struct ParamSegment {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

inline constexpr std::size_t kNoSegment = static_cast<std::size_t>(-1);

// Fixed flat layout over a model/head pair: receptive fields per unimodal
// area, gains, feedbacks, lateral 4-tuples (unimodal areas then multimodal),
// area 3-tuples (same order), then all head weights and biases.
struct TrainablePlan {
  TrainableGroups groups;
  std::vector<ParamSegment> segments;
  std::size_t total = 0;

  std::vector<std::size_t> rf_offset;        // per unimodal area
  std::vector<std::size_t> gain_offset;      // per unimodal area
  std::vector<std::size_t> feedback_offset;  // per unimodal area
  std::vector<std::size_t> lateral_offset;   // per area, multimodal last
  std::vector<std::size_t> area_offset;      // per area, multimodal last
  std::size_t mlp_offset = kNoSegment;

  const ParamSegment& segment_of(std::size_t flat_index) const {
    for (const ParamSegment& s : segments)
      if (flat_index >= s.offset && flat_index < s.offset + s.size) return s;
    throw ConfigError("flat parameter index out of range");
  }
};

inline TrainablePlan make_trainable_plan(const ScfModel& m, const MlpHead& h,
                                         TrainableGroups groups) {
  TrainablePlan plan;
  plan.groups = groups;
  const std::size_t S = m.unimodal.size();
  plan.rf_offset.assign(S, kNoSegment);
  plan.gain_offset.assign(S, kNoSegment);
  plan.feedback_offset.assign(S, kNoSegment);
  plan.lateral_offset.assign(S + 1, kNoSegment);
  plan.area_offset.assign(S + 1, kNoSegment);
  auto add = [&plan](const std::string& name, std::size_t size) {
    plan.segments.push_back({name, plan.total, size});
    plan.total += size;
    return plan.segments.back().offset;
  };
  if (groups.receptive_fields)
    for (std::size_t s = 0; s < S; ++s)
      plan.rf_offset[s] =
          add("rf[" + m.unimodal[s].tag + "]", m.unimodal[s].rf.w.size());
  if (groups.gains)
    for (std::size_t s = 0; s < S; ++s)
      plan.gain_offset[s] = add("gain[" + m.unimodal[s].tag + "]", 1);
  if (groups.feedbacks)
    for (std::size_t s = 0; s < S; ++s)
      plan.feedback_offset[s] = add("feedback[" + m.unimodal[s].tag + "]", 1);
  if (groups.lateral) {
    for (std::size_t s = 0; s < S; ++s)
      plan.lateral_offset[s] = add("lateral[" + m.unimodal[s].tag + "]", 4);
    plan.lateral_offset[S] = add("lateral[m]", 4);
  }
  if (groups.area) {
    for (std::size_t s = 0; s < S; ++s)
      plan.area_offset[s] = add("area[" + m.unimodal[s].tag + "]", 3);
    plan.area_offset[S] = add("area[m]", 3);
  }
  plan.mlp_offset = add("mlp", h.param_count());
  return plan;
}

namespace detail {

inline void lateral_to_flat(const AreaParams& p, double* out) {
  out[0] = p.l_ex;
  out[1] = p.sigma_ex;
  out[2] = p.l_in;
  out[3] = p.sigma_in;
}

inline void lateral_from_flat(const double* in, AreaParams& p) {
  p.l_ex = in[0];
  p.sigma_ex = in[1];
  p.l_in = in[2];
  p.sigma_in = in[3];
}

}  // namespace detail

inline std::vector<double> gather_params(const TrainablePlan& plan,
                                         const ScfModel& m,
                                         const MlpHead& h) {
  std::vector<double> out(plan.total);
  const std::size_t S = m.unimodal.size();
  for (std::size_t s = 0; s < S; ++s) {
    const UnimodalArea& a = m.unimodal[s];
    if (plan.rf_offset[s] != kNoSegment)
      std::copy(a.rf.w.begin(), a.rf.w.end(), out.begin() + plan.rf_offset[s]);
    if (plan.gain_offset[s] != kNoSegment) out[plan.gain_offset[s]] = a.gain;
    if (plan.feedback_offset[s] != kNoSegment)
      out[plan.feedback_offset[s]] = a.feedback;
    if (plan.lateral_offset[s] != kNoSegment)
      detail::lateral_to_flat(a.params, out.data() + plan.lateral_offset[s]);
    if (plan.area_offset[s] != kNoSegment) {
      out[plan.area_offset[s]] = a.params.tau;
      out[plan.area_offset[s] + 1] = a.params.theta;
      out[plan.area_offset[s] + 2] = a.params.slope;
    }
  }
  if (plan.lateral_offset[S] != kNoSegment)
    detail::lateral_to_flat(m.multimodal.params,
                            out.data() + plan.lateral_offset[S]);
  if (plan.area_offset[S] != kNoSegment) {
    out[plan.area_offset[S]] = m.multimodal.params.tau;
    out[plan.area_offset[S] + 1] = m.multimodal.params.theta;
    out[plan.area_offset[S] + 2] = m.multimodal.params.slope;
  }
  std::size_t off = plan.mlp_offset;
  for (int l = 0; l < h.layers(); ++l) {
    std::copy(h.w[l].begin(), h.w[l].end(), out.begin() + off);
    off += h.w[l].size();
    std::copy(h.b[l].begin(), h.b[l].end(), out.begin() + off);
    off += h.b[l].size();
  }
  return out;
}

inline void scatter_params(const TrainablePlan& plan,
                           const std::vector<double>& flat, ScfModel& m,
                           MlpHead& h) {
  if (flat.size() != plan.total)
    throw ConfigError("flat parameter vector size differs from plan");
  const std::size_t S = m.unimodal.size();
  for (std::size_t s = 0; s < S; ++s) {
    UnimodalArea& a = m.unimodal[s];
    if (plan.rf_offset[s] != kNoSegment)
      std::copy(flat.begin() + plan.rf_offset[s],
                flat.begin() + plan.rf_offset[s] + a.rf.w.size(),
                a.rf.w.begin());
    if (plan.gain_offset[s] != kNoSegment) a.gain = flat[plan.gain_offset[s]];
    if (plan.feedback_offset[s] != kNoSegment)
      a.feedback = flat[plan.feedback_offset[s]];
    if (plan.lateral_offset[s] != kNoSegment) {
      detail::lateral_from_flat(flat.data() + plan.lateral_offset[s],
                                a.params);
      a.kernel = make_lateral_kernel(a.state.rows(), a.state.cols(), a.params);
    }
    if (plan.area_offset[s] != kNoSegment) {
      a.params.tau = flat[plan.area_offset[s]];
      a.params.theta = flat[plan.area_offset[s] + 1];
      a.params.slope = flat[plan.area_offset[s] + 2];
    }
  }
  if (plan.lateral_offset[S] != kNoSegment) {
    detail::lateral_from_flat(flat.data() + plan.lateral_offset[S],
                              m.multimodal.params);
    m.multimodal.kernel = make_lateral_kernel(
        m.multimodal.state.rows(), m.multimodal.state.cols(),
        m.multimodal.params);
  }
  if (plan.area_offset[S] != kNoSegment) {
    m.multimodal.params.tau = flat[plan.area_offset[S]];
    m.multimodal.params.theta = flat[plan.area_offset[S] + 1];
    m.multimodal.params.slope = flat[plan.area_offset[S] + 2];
  }
  std::size_t off = plan.mlp_offset;
  for (int l = 0; l < h.layers(); ++l) {
    std::copy(flat.begin() + off, flat.begin() + off + h.w[l].size(),
              h.w[l].begin());
    off += h.w[l].size();
    std::copy(flat.begin() + off, flat.begin() + off + h.b[l].size(),
              h.b[l].begin());
    off += h.b[l].size();
  }
}

// Projects a flat vector back into valid parameter domains after an
// optimizer step. Returns true when anything moved.
inline bool clamp_param_domains(const TrainablePlan& plan,
                                std::vector<double>& flat) {
  bool changed = false;
  auto raise = [&flat, &changed](std::size_t i, double lo) {
    if (flat[i] < lo) {
      flat[i] = lo;
      changed = true;
    }
  };
  for (std::size_t off : plan.lateral_offset)
    if (off != kNoSegment) {
      raise(off + 1, 1e-3);  // sigma_ex
      raise(off + 3, 1e-3);  // sigma_in
    }
  for (std::size_t off : plan.area_offset)
    if (off != kNoSegment) raise(off, 1.0);  // tau
  return changed;
}

}  // namespace scf
