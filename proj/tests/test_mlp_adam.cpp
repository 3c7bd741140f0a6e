#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "scf/adam.hpp"
#include "scf/mlp.hpp"
#include "scf/rng.hpp"

namespace {

scf::MlpHead head_from(std::vector<int> widths) {
  scf::MlpHead h;
  h.widths = std::move(widths);
  for (std::size_t l = 0; l + 1 < h.widths.size(); ++l) {
    h.w.emplace_back(
        static_cast<std::size_t>(h.widths[l]) * h.widths[l + 1], 0.0);
    h.b.emplace_back(static_cast<std::size_t>(h.widths[l + 1]), 0.0);
  }
  return h;
}

TEST(MlpForward, ZeroParametersGiveHalf) {
  scf::MlpHead h = head_from({3, 4, 1});
  EXPECT_DOUBLE_EQ(scf::mlp_forward(h, {0.3, -2.0, 11.0}), 0.5);
  EXPECT_DOUBLE_EQ(scf::mlp_forward(h, {0.0, 0.0, 0.0}), 0.5);
}

TEST(MlpForward, SingleLinearLayerIsLogisticOfDot) {
  scf::MlpHead h = head_from({3, 1});
  h.w[0] = {0.5, -1.0, 2.0};
  h.b[0] = {0.25};
  std::vector<double> x{1.0, 2.0, 0.5};
  double z = 0.5 * 1.0 - 1.0 * 2.0 + 2.0 * 0.5 + 0.25;
  EXPECT_NEAR(scf::mlp_forward(h, x), 1.0 / (1.0 + std::exp(-z)), 1e-15);
}

TEST(MlpForward, FullDropoutMakesOutputIndependentOfInput) {
  scf::Rng init(7);
  scf::MlpHead h = scf::make_mlp_head(5, {8}, init, 1.0);
  for (double& b : h.b[1]) b = 0.4;
  scf::Rng r1(11), r2(11);
  double a = scf::mlp_forward(h, {1.0, 2.0, 3.0, 4.0, 5.0}, &r1);
  double b = scf::mlp_forward(h, {-9.0, 0.0, 2.5, 100.0, -3.0}, &r2);
  EXPECT_DOUBLE_EQ(a, b);
  EXPECT_DOUBLE_EQ(a, 1.0 / (1.0 + std::exp(-0.4)));
}

TEST(MlpForward, InferenceIgnoresDropoutConfiguration) {
  scf::Rng init(7);
  scf::MlpHead h = scf::make_mlp_head(4, {6}, init, 0.5);
  std::vector<double> x{0.1, -0.2, 0.3, 0.4};
  double p = scf::mlp_forward(h, x);
  h.dropout = 0.9;
  EXPECT_DOUBLE_EQ(scf::mlp_forward(h, x), p);
}

TEST(MlpForward, TrainingModeDropoutIsSeedDeterministic) {
  scf::Rng init(3);
  scf::MlpHead h = scf::make_mlp_head(4, {16}, init, 0.5);
  std::vector<double> x{0.5, 1.0, -1.0, 0.25};
  scf::Rng r1(99), r2(99), r3(100);
  double a = scf::mlp_forward(h, x, &r1);
  double b = scf::mlp_forward(h, x, &r2);
  double c = scf::mlp_forward(h, x, &r3);
  EXPECT_DOUBLE_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(MlpForward, RejectsWidthMismatch) {
  scf::MlpHead h = head_from({3, 1});
  EXPECT_THROW(scf::mlp_forward(h, {1.0, 2.0}), scf::ConfigError);
}

TEST(MlpHead, ValidateRejectsBadShapes) {
  scf::MlpHead h = head_from({3, 2});
  EXPECT_THROW(h.validate(), scf::ConfigError);
  scf::MlpHead ok = head_from({3, 2, 1});
  EXPECT_NO_THROW(ok.validate());
  ok.dropout = 1.5;
  EXPECT_THROW(ok.validate(), scf::ConfigError);
}

TEST(MlpHead, GlorotInitBoundsAndZeroBiases) {
  scf::Rng rng(5);
  scf::MlpHead h = scf::make_mlp_head(10, {6}, rng);
  double r0 = std::sqrt(6.0 / (10 + 6));
  for (double w : h.w[0]) {
    EXPECT_GT(w, -r0);
    EXPECT_LT(w, r0);
  }
  for (const auto& layer : h.b)
    for (double b : layer) EXPECT_EQ(b, 0.0);
}

TEST(BceLoss, KnownValues) {
  EXPECT_NEAR(scf::bce_loss(0.5, 1), std::log(2.0), 1e-12);
  EXPECT_NEAR(scf::bce_loss(0.9, 0), 2.302585, 1e-6);
  EXPECT_LT(scf::bce_loss(1.0 - 1e-9, 1), 1e-6);
  EXPECT_GT(scf::bce_loss(0.2, 1), 0.0);
}

TEST(BceLoss, ClampKeepsExtremePredictionsFinite) {
  EXPECT_TRUE(std::isfinite(scf::bce_loss(0.0, 1)));
  EXPECT_TRUE(std::isfinite(scf::bce_loss(1.0, 0)));
  EXPECT_NEAR(scf::bce_loss(0.0, 1), -std::log(1e-7), 1e-9);
}

TEST(MlpBackward, MatchesFiniteDifferences) {
  scf::Rng rng(21);
  scf::MlpHead h = scf::make_mlp_head(3, {5}, rng);
  std::vector<double> x{0.4, -0.8, 1.2};
  int label = 1;

  auto loss_of = [&](const scf::MlpHead& head) {
    return scf::bce_loss(scf::mlp_forward(head, x), label);
  };
  scf::MlpTrace t = scf::mlp_forward_trace(h, x);
  std::vector<double> grad(h.param_count(), 0.0);
  scf::mlp_backward(h, t, scf::bce_logit_grad(t.prob, label), grad.data());

  const double step = 1e-6;
  std::size_t flat = 0;
  for (int l = 0; l < h.layers(); ++l) {
    for (auto* vec : {&h.w[static_cast<std::size_t>(l)],
                      &h.b[static_cast<std::size_t>(l)]}) {
      for (double& p : *vec) {
        double keep = p;
        p = keep + step;
        double up = loss_of(h);
        p = keep - step;
        double down = loss_of(h);
        p = keep;
        double numeric = (up - down) / (2.0 * step);
        EXPECT_NEAR(grad[flat], numeric, 1e-6)
            << "flat parameter " << flat;
        ++flat;
      }
    }
  }
}

TEST(AdamUpdate, FirstStepMovesByLearningRate) {
  scf::AdamParams cfg;
  scf::AdamState state(3);
  std::vector<double> params{1.0, -2.0, 0.5};
  std::vector<double> grads{40.0, -0.003, 1e-4};
  std::vector<double> before = params;
  scf::adam_update(params, grads, state, cfg);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double delta = params[i] - before[i];
    double g = grads[i];
    EXPECT_NEAR(std::abs(delta), cfg.learning_rate,
                cfg.learning_rate * 1e-3);
    EXPECT_LT(delta * g, 0.0) << "moves against the gradient";
  }
  EXPECT_EQ(state.t, 1);
}

TEST(AdamUpdate, ZeroGradientLeavesParametersUnchanged) {
  scf::AdamParams cfg;
  scf::AdamState state(2);
  std::vector<double> params{3.0, -1.0};
  std::vector<double> zeros{0.0, 0.0};
  for (int i = 0; i < 10; ++i) scf::adam_update(params, zeros, state, cfg);
  EXPECT_DOUBLE_EQ(params[0], 3.0);
  EXPECT_DOUBLE_EQ(params[1], -1.0);
}

TEST(AdamUpdate, IdenticalEntriesFollowIdenticalTrajectories) {
  scf::AdamParams cfg;
  scf::AdamState state(2);
  std::vector<double> params{0.7, 0.7};
  scf::Rng rng(13);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    double g = dist(rng);
    std::vector<double> grads{g, g};
    scf::adam_update(params, grads, state, cfg);
    EXPECT_EQ(params[0], params[1]);
  }
}

TEST(AdamUpdate, RejectsSizeMismatch) {
  scf::AdamParams cfg;
  scf::AdamState state(2);
  std::vector<double> params{1.0, 2.0, 3.0};
  std::vector<double> grads{0.1, 0.2, 0.3};
  EXPECT_THROW(scf::adam_update(params, grads, state, cfg),
               scf::ConfigError);
}

TEST(AdamParams, ValidateRejectsBadCoefficients) {
  scf::AdamParams p;
  p.beta1 = 1.0;
  EXPECT_THROW(p.validate(), scf::ConfigError);
  p = scf::AdamParams{};
  p.learning_rate = 0.0;
  EXPECT_THROW(p.validate(), scf::ConfigError);
  p = scf::AdamParams{};
  p.epsilon = -1.0;
  EXPECT_THROW(p.validate(), scf::ConfigError);
}

}  // namespace
