#include "scf/lateral.hpp"

#include <gtest/gtest.h>

#include "scf/grid.hpp"

namespace {

using scf::AreaParams;
using scf::circular_distance;
using scf::lateral_weight;

TEST(CircularDistance, Examples) {
  EXPECT_EQ(circular_distance(3, 3, 17), 0);
  EXPECT_EQ(circular_distance(0, 16, 17), 1);
  EXPECT_EQ(circular_distance(0, 8, 17), 8);
  EXPECT_EQ(circular_distance(8, 0, 17), 8);
}

TEST(CircularDistance, BoundedByHalfAxis) {
  for (int n : {1, 2, 3, 16, 17}) {
    for (int i = 0; i < n; ++i)
      for (int h = 0; h < n; ++h) {
        int d = circular_distance(i, h, n);
        EXPECT_GE(d, 0);
        EXPECT_LE(d, n / 2);
        EXPECT_EQ(d, circular_distance(h, i, n));
      }
  }
}

TEST(LateralWeight, CenterIsExcitationMinusInhibition) {
  AreaParams p;
  p.l_ex = 2.0;
  p.l_in = 1.8;
  EXPECT_DOUBLE_EQ(lateral_weight(0, 0, p), 2.0 - 1.8);
  p.l_ex = 0.7;
  p.l_in = 0.1;
  EXPECT_DOUBLE_EQ(lateral_weight(0, 0, p), 0.7 - 0.1);
}

TEST(LateralWeight, HandEvaluatedSurroundValue) {
  AreaParams p;
  p.l_ex = 2.0;
  p.sigma_ex = 1.0;
  p.l_in = 1.0;
  p.sigma_in = 4.0;
  EXPECT_NEAR(lateral_weight(3, 0, p), -0.7326216089125227, 1e-12);
  EXPECT_NEAR(lateral_weight(0, 3, p), -0.7326216089125227, 1e-12);
}

TEST(LateralWeight, DistantSurroundIsInhibitory) {
  AreaParams p;  // defaults: l_ex=2 > l_in=1.8, sigma_ex=1 < sigma_in=4
  for (int dx = 4; dx <= 8; ++dx)
    for (int dy = 0; dy <= 8; ++dy)
      EXPECT_LT(lateral_weight(dx, dy, p), 0.0) << dx << "," << dy;
}

TEST(LateralWeight, DependsOnlyOnSquaredDistance) {
  AreaParams p;
  EXPECT_DOUBLE_EQ(lateral_weight(3, 4, p), lateral_weight(5, 0, p));
  EXPECT_DOUBLE_EQ(lateral_weight(1, 2, p), lateral_weight(2, 1, p));
}

TEST(LateralKernel, PointReflectionSymmetry) {
  AreaParams p;
  for (auto [rows, cols] : {std::pair{17, 17}, {16, 12}, {5, 9}}) {
    scf::LateralKernel k = scf::make_lateral_kernel(rows, cols, p);
    EXPECT_DOUBLE_EQ(k.weights(0, 0), p.l_ex - p.l_in);
    for (int a = 0; a < rows; ++a)
      for (int b = 0; b < cols; ++b)
        EXPECT_DOUBLE_EQ(k.weights(a, b), k.weights.at_wrapped(-a, -b));
  }
}

TEST(LateralKernel, EntriesMatchCircularOffsets) {
  AreaParams p;
  scf::LateralKernel k = scf::make_lateral_kernel(17, 17, p);
  for (int a = 0; a < 17; ++a)
    for (int b = 0; b < 17; ++b)
      EXPECT_DOUBLE_EQ(k.weights(a, b),
                       lateral_weight(circular_distance(a, 0, 17),
                                      circular_distance(b, 0, 17), p));
}

TEST(AreaParams, ValidateRejectsBadDomains) {
  AreaParams p;
  p.tau = 0.5;
  EXPECT_THROW(p.validate(), scf::ConfigError);
  p = AreaParams{};
  p.sigma_ex = 0.0;
  EXPECT_THROW(p.validate(), scf::ConfigError);
  p = AreaParams{};
  p.sigma_in = -1.0;
  EXPECT_THROW(p.validate(), scf::ConfigError);
  EXPECT_NO_THROW(AreaParams{}.validate());
}

}  // namespace
