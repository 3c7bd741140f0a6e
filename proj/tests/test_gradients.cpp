#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "scf/classifier.hpp"
#include "scf/gradcheck.hpp"
#include "scf/mlp.hpp"
#include "scf/rng.hpp"
#include "model_test_util.hpp"

namespace {

scf::EmbeddingDataset tiny_dataset(int n, int dim, std::uint64_t seed) {
  scf::EmbeddingDataset ds;
  ds.dim_audio = static_cast<std::uint32_t>(dim);
  ds.dim_visual = static_cast<std::uint32_t>(dim);
  scf::Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    scf::EmbeddingInstance inst;
    inst.clip_id = "clip" + std::to_string(i);
    inst.group_id = "grp" + std::to_string(i % 2);
    inst.label = static_cast<std::uint8_t>(i % 2);
    for (int d = 0; d < dim; ++d) {
      inst.audio.push_back(static_cast<float>(normal(rng)));
      inst.visual.push_back(static_cast<float>(normal(rng)));
    }
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

scf::ScfClassifier small_classifier(int steps, scf::TrainableGroups groups,
                                    std::uint64_t seed = 42) {
  scf::testutil::ModelSpec spec;
  spec.rows = 5;
  spec.cols = 5;
  spec.steps = steps;
  spec.seed = seed;
  scf::ScfModel model = scf::testutil::build_model(spec);
  scf::Rng rng(scf::derive_seed(seed, scf::seeds::mlp_init));
  scf::MlpHead head = scf::make_mlp_head(5 * 5, {8}, rng);
  return scf::ScfClassifier(std::move(model), std::move(head), groups);
}

std::vector<std::size_t> all_indices(const scf::EmbeddingDataset& ds) {
  std::vector<std::size_t> idx(ds.instances.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return idx;
}

TEST(GradientOracle, AllParameterGroupsMatchFiniteDifferences) {
  scf::TrainableGroups groups;
  groups.receptive_fields = true;
  groups.gains = true;
  groups.feedbacks = true;
  groups.lateral = true;
  groups.area = true;
  scf::ScfClassifier c = small_classifier(3, groups);
  scf::EmbeddingDataset ds = tiny_dataset(4, 4, 99);
  std::vector<double> before = c.get_params();

  scf::GradCheckReport report = scf::gradient_check(c, ds, all_indices(ds));
  EXPECT_TRUE(report.ok(1e-4))
      << "worst segment " << report.worst_segment << " index "
      << report.worst_index << ": analytic " << report.worst_analytic
      << " vs numeric " << report.worst_numeric << " (rel "
      << report.max_rel_error << ")";
  EXPECT_GT(report.parameters_checked, 200u);
  EXPECT_EQ(c.get_params(), before) << "check must restore parameters";
}

TEST(GradientOracle, DefaultGroupsMatchFiniteDifferences) {
  scf::ScfClassifier c = small_classifier(3, scf::TrainableGroups{});
  scf::EmbeddingDataset ds = tiny_dataset(4, 4, 7);
  scf::GradCheckReport report = scf::gradient_check(c, ds, all_indices(ds));
  EXPECT_TRUE(report.ok(1e-4))
      << report.worst_segment << ": rel " << report.max_rel_error;
}

TEST(GradientOracle, ConcatBaselineMatchesFiniteDifferences) {
  scf::Rng rng(3);
  scf::ConcatClassifier c(scf::make_mlp_head(8, {6}, rng));
  scf::EmbeddingDataset ds = tiny_dataset(6, 4, 15);
  scf::GradCheckReport report = scf::gradient_check(c, ds, all_indices(ds));
  EXPECT_TRUE(report.ok(1e-4))
      << report.worst_segment << ": rel " << report.max_rel_error;
}

TEST(GradientOracle, LongerUnrollStillMatches) {
  scf::ScfClassifier c = small_classifier(8, scf::TrainableGroups{});
  scf::EmbeddingDataset ds = tiny_dataset(2, 4, 23);
  scf::GradCheckReport report = scf::gradient_check(c, ds, all_indices(ds));
  EXPECT_TRUE(report.ok(1e-4))
      << report.worst_segment << ": rel " << report.max_rel_error;
}

TEST(Gradients, NoDynamicsMeansZeroReceptiveFieldGradient) {
  scf::ScfClassifier c = small_classifier(0, scf::TrainableGroups{});
  scf::EmbeddingDataset ds = tiny_dataset(2, 4, 5);
  std::vector<double> grad(c.param_count(), 0.0);
  (void)c.grad(ds.instances[0], grad, nullptr);
  (void)c.grad(ds.instances[1], grad, nullptr);

  for (const scf::ParamSegment& s : c.segments()) {
    if (s.name == "mlp") continue;
    for (std::size_t i = s.offset; i < s.offset + s.size; ++i)
      EXPECT_EQ(grad[i], 0.0) << s.name << " at " << i;
  }

  // one instance alone: the head bias gradient is prob - label, not zero
  std::vector<double> single(c.param_count(), 0.0);
  scf::GradOutcome out = c.grad(ds.instances[1], single, nullptr);
  EXPECT_NEAR(single[c.param_count() - 1],
              out.prob - static_cast<double>(ds.instances[1].label), 1e-15);
  EXPECT_NE(single[c.param_count() - 1], 0.0)
      << "head gradients must still flow";
}

TEST(Gradients, OutputBiasGradientIsMeanError) {
  scf::ScfClassifier c = small_classifier(3, scf::TrainableGroups{});
  std::vector<double> params = c.get_params();
  for (const scf::ParamSegment& s : c.segments())
    if (s.name.rfind("rf[", 0) == 0)
      std::fill(params.begin() + static_cast<std::ptrdiff_t>(s.offset),
                params.begin() + static_cast<std::ptrdiff_t>(s.offset + s.size),
                0.0);
  c.set_params(params);

  scf::EmbeddingDataset ds = tiny_dataset(6, 4, 31);
  std::vector<double> grad(c.param_count(), 0.0);
  double mean_error = 0.0;
  for (const scf::EmbeddingInstance& inst : ds.instances) {
    scf::GradOutcome out = c.grad(inst, grad, nullptr);
    mean_error += out.prob - static_cast<double>(inst.label);
  }
  mean_error /= static_cast<double>(ds.instances.size());
  double bias_grad = grad[c.param_count() - 1] /
                     static_cast<double>(ds.instances.size());
  EXPECT_NEAR(bias_grad, mean_error, 1e-12);
}

TEST(Gradients, ZeroEmbeddingStillPredictsConstant) {
  scf::ScfClassifier c = small_classifier(0, scf::TrainableGroups{});
  scf::EmbeddingDataset ds = tiny_dataset(3, 4, 77);
  double p0 = c.predict(ds.instances[0]);
  EXPECT_DOUBLE_EQ(c.predict(ds.instances[1]), p0);
  EXPECT_DOUBLE_EQ(c.predict(ds.instances[2]), p0);
}

TEST(Gradients, GradCheckRejectsEmptyBatch) {
  scf::ScfClassifier c = small_classifier(2, scf::TrainableGroups{});
  scf::EmbeddingDataset ds = tiny_dataset(2, 4, 1);
  EXPECT_THROW(scf::gradient_check(c, ds, {}), scf::InputError);
}

TEST(Gradients, ScfClassifierRejectsMismatchedHead) {
  scf::testutil::ModelSpec spec;
  spec.rows = 5;
  spec.cols = 5;
  scf::ScfModel model = scf::testutil::build_model(spec);
  scf::Rng rng(1);
  scf::MlpHead head = scf::make_mlp_head(24, {4}, rng);
  EXPECT_THROW(scf::ScfClassifier(std::move(model), std::move(head),
                                  scf::TrainableGroups{}),
               scf::ConfigError);
}

}  // namespace
