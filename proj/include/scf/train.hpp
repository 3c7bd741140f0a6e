#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "scf/adam.hpp"
#include "scf/classifier.hpp"
#include "scf/dataset.hpp"
#include "scf/errors.hpp"
#include "scf/rng.hpp"

namespace scf {

struct TrainConfig {
  AdamParams adam;
  int batch_size = 32;
  int max_epochs = 40;
  int patience = 5;
  double validation_fraction = 0.1;
  double threshold = 0.5;  // decision boundary for accuracy
  std::uint64_t seed = 42;

  void validate() const {
    adam.validate();
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
    if (patience < 1) throw ConfigError("patience must be at least 1");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
      throw ConfigError(
          "validation_fraction must lie strictly between 0 and 1");
    if (!(threshold > 0.0 && threshold < 1.0))
      throw ConfigError("threshold must lie strictly between 0 and 1");
  }
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

using History = std::vector<EpochStats>;

struct TrainResult {
  History history;
  int best_epoch = 0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  AdamState optimizer;  // state after the last executed step
};

namespace detail {

// Stratified carve-out: a fixed fraction of each label goes to validation.
inline void validation_split(const EmbeddingDataset& ds,
                             const std::vector<std::size_t>& indices,
                             double fraction, std::uint64_t seed,
                             std::vector<std::size_t>& train,
                             std::vector<std::size_t>& val) {
  std::vector<std::size_t> by_label[2];
  for (std::size_t i : indices)
    by_label[ds.instances[i].label].push_back(i);
  Rng rng(seed);
  for (auto& idx : by_label) {
    std::shuffle(idx.begin(), idx.end(), rng);
    std::size_t n_val =
        idx.size() >= 2
            ? std::max<std::size_t>(
                  1, static_cast<std::size_t>(std::llround(
                         fraction * static_cast<double>(idx.size()))))
            : 0;
    if (n_val >= idx.size() && !idx.empty()) n_val = idx.size() - 1;
    val.insert(val.end(), idx.begin(), idx.begin() + n_val);
    train.insert(train.end(), idx.begin() + n_val, idx.end());
  }
}

}  // namespace detail

// Minibatch Adam with early stopping on validation loss; returns the
// history and leaves the classifier holding the best-epoch parameters.
inline TrainResult train(Classifier& c, const EmbeddingDataset& ds,
                         const std::vector<std::size_t>& indices,
                         const TrainConfig& cfg) {
  cfg.validate();
  if (indices.empty()) throw InputError("training set is empty");

  std::vector<std::size_t> train_idx, val_idx;
  detail::validation_split(ds, indices, cfg.validation_fraction,
                           derive_seed(cfg.seed, seeds::validation_split),
                           train_idx, val_idx);
  bool has[2] = {false, false};
  for (std::size_t i : train_idx) has[ds.instances[i].label] = true;
  if (!has[0] || !has[1])
    throw InputError("training split contains a single class");
  if (val_idx.empty())
    throw InputError("validation split is empty; dataset too small");

  Rng dropout_rng(derive_seed(cfg.seed, seeds::dropout));
  AdamState opt(c.param_count());
  std::vector<double> params = c.get_params();
  std::vector<double> grad(c.param_count());
  std::vector<double> best_params = params;

  TrainResult result;
  int bad_epochs = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Rng shuffle_rng(
        derive_seed(cfg.seed, seeds::epoch_shuffle +
                                  static_cast<std::uint64_t>(epoch)));
    std::shuffle(train_idx.begin(), train_idx.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < train_idx.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      std::size_t end = std::min(train_idx.size(),
                                 start + static_cast<std::size_t>(cfg.batch_size));
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const EmbeddingInstance& inst = ds.instances[train_idx[b]];
        GradOutcome out = c.grad(inst, grad, &dropout_rng);
        loss_sum += out.loss;
        if ((out.prob >= cfg.threshold ? 1 : 0) == inst.label) ++correct;
      }
      double inv = 1.0 / static_cast<double>(end - start);
      for (double& g : grad) g *= inv;
      adam_update(params, grad, opt, cfg.adam);
      c.clamp_params(params);
      c.set_params(params);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(train_idx.size());
    stats.train_accuracy =
        static_cast<double>(correct) / static_cast<double>(train_idx.size());

    double val_loss = 0.0;
    std::size_t val_correct = 0;
    for (std::size_t i : val_idx) {
      const EmbeddingInstance& inst = ds.instances[i];
      double prob = c.predict(inst);
      val_loss += bce_loss(prob, inst.label);
      if ((prob >= cfg.threshold ? 1 : 0) == inst.label) ++val_correct;
    }
    stats.val_loss = val_loss / static_cast<double>(val_idx.size());
    stats.val_accuracy =
        static_cast<double>(val_correct) / static_cast<double>(val_idx.size());
    if (!std::isfinite(stats.val_loss))
      throw TrainingError("validation loss diverged at epoch " +
                          std::to_string(epoch));
    result.history.push_back(stats);

    if (stats.val_loss < result.best_val_loss) {
      result.best_val_loss = stats.val_loss;
      result.best_epoch = epoch;
      best_params = params;
      bad_epochs = 0;
    } else {
      ++bad_epochs;
      if (bad_epochs >= cfg.patience) break;
    }
  }

  c.set_params(best_params);
  result.optimizer = std::move(opt);
  return result;
}

// Fraction of instances whose thresholded prediction matches the label.
inline double evaluate_accuracy(const Classifier& c,
                                const EmbeddingDataset& ds,
                                const std::vector<std::size_t>& indices,
                                double threshold = 0.5) {
  if (indices.empty()) throw InputError("evaluation set is empty");
  std::size_t correct = 0;
  for (std::size_t i : indices) {
    const EmbeddingInstance& inst = ds.instances[i];
    if ((c.predict(inst) >= threshold ? 1 : 0) == inst.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

}  // namespace scf
