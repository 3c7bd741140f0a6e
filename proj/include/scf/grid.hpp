#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "scf/errors.hpp"

namespace scf {

// Positive remainder of i mod n.
inline int wrap_index(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

// Dense row-major rows x cols matrix of doubles. Used for neuron
// activities, composite inputs and lateral kernels.
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, double fill = 0.0)
      : rows_(rows),
        cols_(cols),
        v_(static_cast<std::size_t>(rows <= 0 ? 0 : rows) *
               static_cast<std::size_t>(cols <= 0 ? 0 : cols),
           fill) {
    if (rows <= 0 || cols <= 0)
      throw ConfigError("grid dimensions must be positive");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return v_.size(); }

  double& operator()(int i, int j) {
    return v_[static_cast<std::size_t>(i) * cols_ + j];
  }
  double operator()(int i, int j) const {
    return v_[static_cast<std::size_t>(i) * cols_ + j];
  }

  // Circular access; any integer index is valid.
  double at_wrapped(int i, int j) const {
    return (*this)(wrap_index(i, rows_), wrap_index(j, cols_));
  }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  bool same_shape(const Grid& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  Grid& operator+=(const Grid& o) {
    for (std::size_t t = 0; t < v_.size(); ++t) v_[t] += o.v_[t];
    return *this;
  }

  Grid& add_scaled(const Grid& o, double c) {
    for (std::size_t t = 0; t < v_.size(); ++t) v_[t] += c * o.v_[t];
    return *this;
  }

  Grid& fill(double c) {
    for (auto& x : v_) x = c;
    return *this;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> v_;
};

inline double grid_sum(const Grid& g) {
  double s = 0.0;
  for (double x : g.values()) s += x;
  return s;
}

inline double max_abs_diff(const Grid& a, const Grid& b) {
  double m = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t)
    m = std::max(m, std::abs(a.values()[t] - b.values()[t]));
  return m;
}

// Circular shift: out(i, j) = in(i - di, j - dj), wrapped.
inline Grid shifted(const Grid& g, int di, int dj) {
  Grid out(g.rows(), g.cols());
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) out(i, j) = g.at_wrapped(i - di, j - dj);
  return out;
}

}  // namespace scf
