#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "scf/area.hpp"
#include "scf/fft.hpp"
#include "scf/grid.hpp"

namespace scf {

// Shortest distance between two indices on a ring of length n.
inline int circular_distance(int i, int h, int n) {
  int d = std::abs(i - h);
  return std::min(d, n - d);
}

// Mexican-hat profile: difference of an excitatory and an inhibitory
// Gaussian over the circular offset (d_x, d_y).
inline double lateral_weight(int d_x, int d_y, const AreaParams& params) {
  double d2 = static_cast<double>(d_x) * d_x + static_cast<double>(d_y) * d_y;
  return params.l_ex * std::exp(-d2 / (2.0 * params.sigma_ex * params.sigma_ex)) -
         params.l_in * std::exp(-d2 / (2.0 * params.sigma_in * params.sigma_in));
}

// Connection weights indexed by circular offset, with the frequency-domain
// image cached for the fast convolution path. Radially symmetric, so the
// grid equals its own circular point-reflection.
struct LateralKernel {
  Grid weights;
  std::vector<fft::cd> spectrum;
};

inline LateralKernel make_lateral_kernel(int rows, int cols,
                                         const AreaParams& params) {
  Grid w(rows, cols);
  for (int a = 0; a < rows; ++a)
    for (int b = 0; b < cols; ++b)
      w(a, b) = lateral_weight(circular_distance(a, 0, rows),
                               circular_distance(b, 0, cols), params);
  std::vector<fft::cd> spec = fft::fft2(w);
  return LateralKernel{std::move(w), std::move(spec)};
}

}  // namespace scf
