#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "scf/classifier.hpp"
#include "scf/dataset.hpp"
#include "scf/errors.hpp"
#include "scf/rng.hpp"
#include "scf/train.hpp"

namespace scf {

// Builds a fresh, untrained classifier for one fold; the seed controls
// every stochastic choice inside that fold (init, shuffling, dropout).
using ClassifierFactory =
    std::function<std::unique_ptr<Classifier>(std::uint64_t fold_seed)>;

struct FoldResult {
  double accuracy = 0.0;
  // Group ids in the independent scenario, clip ids in the dependent one.
  std::vector<std::string> held_out;
  History history;
  int best_epoch = 0;
};

struct FoldReport {
  Scenario scenario = Scenario::dependent;
  std::vector<FoldResult> folds;

  double mean_accuracy() const {
    double sum = 0.0;
    for (const FoldResult& f : folds) sum += f.accuracy;
    return sum / static_cast<double>(folds.size());
  }

  // Population standard deviation over the per-fold accuracies.
  double std_accuracy() const {
    double mean = mean_accuracy();
    double sq = 0.0;
    for (const FoldResult& f : folds) {
      double d = f.accuracy - mean;
      sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(folds.size()));
  }

  // "91.25 (2.50) [%]": mean and spread as percentages.
  std::string summary() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f (%.2f) [%%]",
                  100.0 * mean_accuracy(), 100.0 * std_accuracy());
    return buf;
  }

  std::string table() const {
    std::string out = "fold  accuracy  best_epoch  held_out\n";
    for (std::size_t f = 0; f < folds.size(); ++f) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%4zu  %7.2f%%  %10d  ", f,
                    100.0 * folds[f].accuracy, folds[f].best_epoch);
      out += buf;
      for (std::size_t i = 0; i < folds[f].held_out.size(); ++i) {
        if (i > 0) out += ",";
        out += folds[f].held_out[i];
      }
      out += "\n";
    }
    out += "mean (std): " + summary() + "\n";
    return out;
  }
};

// k-fold cross validation: trains a fresh classifier per fold and scores
// it on the held-out instances. Fold boundaries come from the dataset
// split; per-fold seeds are derived from the config seed so folds can be
// run in any order (or concurrently) without changing results.
inline FoldReport cross_validate(const ClassifierFactory& factory,
                                 const EmbeddingDataset& ds,
                                 Scenario scenario, int k,
                                 const TrainConfig& cfg) {
  cfg.validate();
  FoldAssignment assignment = split_groups(
      ds, scenario, k, derive_seed(cfg.seed, seeds::fold_split));
  std::vector<FoldIndices> folds = materialize_folds(ds, assignment);

  FoldReport report;
  report.scenario = scenario;
  for (int f = 0; f < k; ++f) {
    const FoldIndices& idx = folds[static_cast<std::size_t>(f)];
    if (idx.test.empty())
      throw InputError("fold " + std::to_string(f) + " has no test instances");

    std::uint64_t fold_seed =
        derive_seed(cfg.seed, seeds::fold_run + static_cast<std::uint64_t>(f));
    std::unique_ptr<Classifier> c = factory(fold_seed);

    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = fold_seed;
    TrainResult trained = train(*c, ds, idx.train, fold_cfg);

    FoldResult result;
    result.accuracy = evaluate_accuracy(*c, ds, idx.test, cfg.threshold);
    result.held_out = assignment.test_ids[static_cast<std::size_t>(f)];
    result.history = std::move(trained.history);
    result.best_epoch = trained.best_epoch;
    report.folds.push_back(std::move(result));
  }
  return report;
}

}  // namespace scf
