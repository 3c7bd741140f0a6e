#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "scf/backprop.hpp"
#include "scf/dataset.hpp"
#include "scf/errors.hpp"
#include "scf/mlp.hpp"
#include "scf/model.hpp"
#include "scf/params.hpp"

namespace scf {

struct GradOutcome {
  double loss = 0.0;
  double prob = 0.0;
};

// A trainable map from an EmbeddingInstance to a speaking probability, with
// its parameters exposed as one flat vector. The fusion path and the
// concatenation baseline both implement it, so the trainer and the
// cross-validation harness cannot tell them apart.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::size_t param_count() const = 0;
  virtual std::vector<double> get_params() const = 0;
  virtual void set_params(const std::vector<double>& flat) = 0;
  virtual void clamp_params(std::vector<double>& flat) const { (void)flat; }
  virtual const std::vector<ParamSegment>& segments() const = 0;

  // Accumulates d(instance loss)/d(params) into grad_accum and returns the
  // instance loss and prediction. A non-null rng enables dropout.
  virtual GradOutcome grad(const EmbeddingInstance& inst,
                           std::vector<double>& grad_accum,
                           Rng* dropout_rng) = 0;

  virtual double predict(const EmbeddingInstance& inst) const = 0;

  double loss(const EmbeddingInstance& inst) const {
    return bce_loss(predict(inst), inst.label);
  }
};

namespace detail {

inline void check_finite_loss(double loss, double prob, const char* path,
                              const std::string& clip) {
  if (!std::isfinite(loss))
    throw TrainingError(std::string(path) + " loss is not finite on clip \"" +
                        clip + "\" (prediction " + std::to_string(prob) + ")");
}

}  // namespace detail

class ScfClassifier : public Classifier {
 public:
  ScfClassifier(ScfModel model, MlpHead head, TrainableGroups groups)
      : model_(std::move(model)), head_(std::move(head)) {
    model_.validate();
    head_.validate();
    if (model_.unimodal.size() != 2)
      throw ConfigError("fusion classifier expects two unimodal areas");
    if (head_.widths.front() != model_.rows() * model_.cols())
      throw ConfigError("head input width " +
                        std::to_string(head_.widths.front()) +
                        " does not match fused embedding length " +
                        std::to_string(model_.rows() * model_.cols()));
    plan_ = make_trainable_plan(model_, head_, groups);
  }

  std::size_t param_count() const override { return plan_.total; }

  std::vector<double> get_params() const override {
    return gather_params(plan_, model_, head_);
  }

  void set_params(const std::vector<double>& flat) override {
    scatter_params(plan_, flat, model_, head_);
  }

  void clamp_params(std::vector<double>& flat) const override {
    clamp_param_domains(plan_, flat);
  }

  const std::vector<ParamSegment>& segments() const override {
    return plan_.segments;
  }

  GradOutcome grad(const EmbeddingInstance& inst,
                   std::vector<double>& grad_accum,
                   Rng* dropout_rng) override {
    StimulusSet stimuli = stimuli_for(inst);
    ForwardTrace trace = scf_forward_trace(model_, stimuli);
    MlpTrace head_trace =
        mlp_forward_trace(head_, fused_embedding(trace), dropout_rng);
    double loss = bce_loss(head_trace.prob, inst.label);
    detail::check_finite_loss(loss, head_trace.prob, "fusion", inst.clip_id);
    std::vector<double> d_embedding;
    mlp_backward(head_, head_trace, bce_logit_grad(head_trace.prob, inst.label),
                 grad_accum.data() + plan_.mlp_offset, &d_embedding);
    Grid d_grid(model_.rows(), model_.cols());
    d_grid.values() = std::move(d_embedding);
    scf_backward(model_, plan_, trace, stimuli, d_grid, grad_accum);
    return {loss, head_trace.prob};
  }

  double predict(const EmbeddingInstance& inst) const override {
    return mlp_forward(head_, fused_forward(model_, stimuli_for(inst)));
  }

  const ScfModel& model() const { return model_; }
  const MlpHead& head() const { return head_; }
  const TrainablePlan& plan() const { return plan_; }

 private:
  StimulusSet stimuli_for(const EmbeddingInstance& inst) const {
    return {{model_.unimodal[0].tag, widen(inst.audio)},
            {model_.unimodal[1].tag, widen(inst.visual)}};
  }

  ScfModel model_;
  MlpHead head_;
  TrainablePlan plan_;
};

class ConcatClassifier : public Classifier {
 public:
  explicit ConcatClassifier(MlpHead head) : head_(std::move(head)) {
    head_.validate();
    segments_ = {{"mlp", 0, head_.param_count()}};
  }

  std::size_t param_count() const override { return head_.param_count(); }

  std::vector<double> get_params() const override {
    std::vector<double> out;
    out.reserve(param_count());
    for (int l = 0; l < head_.layers(); ++l) {
      out.insert(out.end(), head_.w[l].begin(), head_.w[l].end());
      out.insert(out.end(), head_.b[l].begin(), head_.b[l].end());
    }
    return out;
  }

  void set_params(const std::vector<double>& flat) override {
    if (flat.size() != param_count())
      throw ConfigError("flat parameter vector size differs from head");
    std::size_t off = 0;
    for (int l = 0; l < head_.layers(); ++l) {
      std::copy(flat.begin() + off, flat.begin() + off + head_.w[l].size(),
                head_.w[l].begin());
      off += head_.w[l].size();
      std::copy(flat.begin() + off, flat.begin() + off + head_.b[l].size(),
                head_.b[l].begin());
      off += head_.b[l].size();
    }
  }

  const std::vector<ParamSegment>& segments() const override {
    return segments_;
  }

  GradOutcome grad(const EmbeddingInstance& inst,
                   std::vector<double>& grad_accum,
                   Rng* dropout_rng) override {
    MlpTrace trace = mlp_forward_trace(head_, concat(inst), dropout_rng);
    double loss = bce_loss(trace.prob, inst.label);
    detail::check_finite_loss(loss, trace.prob, "concat", inst.clip_id);
    mlp_backward(head_, trace, bce_logit_grad(trace.prob, inst.label),
                 grad_accum.data());
    return {loss, trace.prob};
  }

  double predict(const EmbeddingInstance& inst) const override {
    return mlp_forward(head_, concat(inst));
  }

  const MlpHead& head() const { return head_; }

 private:
  static std::vector<double> concat(const EmbeddingInstance& inst) {
    std::vector<double> x;
    x.reserve(inst.audio.size() + inst.visual.size());
    x.insert(x.end(), inst.audio.begin(), inst.audio.end());
    x.insert(x.end(), inst.visual.begin(), inst.visual.end());
    return x;
  }

  MlpHead head_;
  std::vector<ParamSegment> segments_;
};

}  // namespace scf
