#pragma once

#include <string>
#include <vector>

#include "scf/area.hpp"
#include "scf/errors.hpp"
#include "scf/fft.hpp"
#include "scf/grid.hpp"
#include "scf/lateral.hpp"

namespace scf {

enum class ConvMode { naive, fast };

inline const char* to_string(ConvMode m) {
  return m == ConvMode::naive ? "naive" : "fast";
}

inline ConvMode conv_mode_from_string(const std::string& s) {
  if (s == "naive") return ConvMode::naive;
  if (s == "fast") return ConvMode::fast;
  throw ConfigError("unknown convolution mode \"" + s +
                    "\", expected \"naive\" or \"fast\"");
}

// Direct O((NM)^2) circular convolution; the reference the fast path is
// checked against.
inline Grid circular_convolve_naive(const Grid& kernel, const Grid& z) {
  Grid out(z.rows(), z.cols());
  for (int i = 0; i < z.rows(); ++i)
    for (int j = 0; j < z.cols(); ++j) {
      double s = 0.0;
      for (int h = 0; h < z.rows(); ++h)
        for (int k = 0; k < z.cols(); ++k)
          s += kernel.at_wrapped(i - h, j - k) * z(h, k);
      out(i, j) = s;
    }
  return out;
}

inline Grid circular_convolve_fft(const std::vector<fft::cd>& kernel_spectrum,
                                  const Grid& z) {
  std::vector<fft::cd> zs = fft::fft2(z);
  for (std::size_t t = 0; t < zs.size(); ++t) zs[t] *= kernel_spectrum[t];
  return fft::ifft2_real(std::move(zs), z.rows(), z.cols());
}

inline Grid circular_convolve(const LateralKernel& kernel, const Grid& z,
                              ConvMode mode) {
  if (!kernel.weights.same_shape(z))
    throw ConfigError("kernel shape " + std::to_string(kernel.weights.rows()) +
                      "x" + std::to_string(kernel.weights.cols()) +
                      " does not match grid shape " +
                      std::to_string(z.rows()) + "x" +
                      std::to_string(z.cols()));
  if (mode == ConvMode::naive)
    return circular_convolve_naive(kernel.weights, z);
  return circular_convolve_fft(kernel.spectrum, z);
}

// Convolution of two plain grids, for gradient paths that convolve against
// activity rather than a fixed kernel.
inline Grid circular_convolve_grids(const Grid& a, const Grid& b,
                                    ConvMode mode) {
  if (!a.same_shape(b))
    throw ConfigError("convolution operands differ in shape");
  if (mode == ConvMode::naive) return circular_convolve_naive(a, b);
  std::vector<fft::cd> as = fft::fft2(a);
  std::vector<fft::cd> bs = fft::fft2(b);
  for (std::size_t t = 0; t < as.size(); ++t) as[t] *= bs[t];
  return fft::ifft2_real(std::move(as), a.rows(), a.cols());
}

// Weighted sum of neighboring activities under the area's lateral kernel.
inline Grid lateral_input(const AreaState& state, const LateralKernel& kernel,
                          ConvMode mode) {
  return circular_convolve(kernel, state.activity, mode);
}

}  // namespace scf
