#pragma once

#include <cmath>

#include "scf/errors.hpp"
#include "scf/grid.hpp"

namespace scf {

// Dynamic parameters of one neural area.
struct AreaParams {
  double tau = 3.0;       // response time constant, >= 1
  double theta = 0.5;     // activation center
  double slope = 10.0;    // activation slope
  double l_ex = 2.0;      // lateral excitation strength
  double sigma_ex = 1.0;  // lateral excitation spread
  double l_in = 1.8;      // lateral inhibition strength
  double sigma_in = 4.0;  // lateral inhibition spread

  void validate() const {
    if (!(tau >= 1.0))
      throw ConfigError("tau must be >= 1, got " + std::to_string(tau));
    if (!(sigma_ex > 0.0))
      throw ConfigError("sigma_ex must be positive, got " +
                        std::to_string(sigma_ex));
    if (!(sigma_in > 0.0))
      throw ConfigError("sigma_in must be positive, got " +
                        std::to_string(sigma_in));
  }
};

// Activity grid z of one area. Values stay in [0,1] under the update rule
// as long as tau >= 1, since each step is a convex combination of the old
// value and an activation in (0,1).
struct AreaState {
  Grid activity;

  AreaState() = default;
  AreaState(int rows, int cols) : activity(rows, cols) {}

  int rows() const { return activity.rows(); }
  int cols() const { return activity.cols(); }
};

// Logistic activation centered at theta with the area's slope.
inline double activation(double u, const AreaParams& params) {
  return 1.0 / (1.0 + std::exp(-params.slope * (u - params.theta)));
}

// Derivative of the logistic in terms of its output value.
inline double activation_grad_from_output(double a) { return a * (1.0 - a); }

}  // namespace scf
