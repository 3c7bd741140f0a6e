#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <vector>

#include "scf/grid.hpp"

// Frequency-domain transforms backing the fast lateral-input path and the
// audio spectrogram. Arbitrary lengths are supported: powers of two run the
// iterative radix-2 kernel, small other sizes use a cached DFT matrix, and
// everything else goes through Bluestein's chirp-z reduction to a power of
// two. Inverse transforms use the conjugation identity and scale by 1/n.

namespace scf::fft {

using cd = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct Pow2Plan {
  std::size_t n;
  std::vector<cd> twiddle;        // exp(-2*pi*i*k/n), k < n/2
  std::vector<std::uint32_t> rev;  // bit-reversal permutation

  explicit Pow2Plan(std::size_t n_) : n(n_), twiddle(n_ / 2), rev(n_) {
    for (std::size_t k = 0; k < n / 2; ++k) {
      double ang = -2.0 * std::numbers::pi * static_cast<double>(k) /
                   static_cast<double>(n);
      twiddle[k] = cd(std::cos(ang), std::sin(ang));
    }
    std::uint32_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t r = 0;
      for (std::uint32_t b = 0; b < log2n; ++b)
        if (i & (std::size_t{1} << b)) r |= std::uint32_t{1} << (log2n - 1 - b);
      rev[i] = r;
    }
  }

  void forward(cd* a) const {
    for (std::size_t i = 0; i < n; ++i)
      if (i < rev[i]) std::swap(a[i], a[rev[i]]);
    for (std::size_t len = 2; len <= n; len <<= 1) {
      std::size_t stride = n / len;
      for (std::size_t start = 0; start < n; start += len) {
        for (std::size_t k = 0; k < len / 2; ++k) {
          cd w = twiddle[k * stride];
          cd u = a[start + k];
          cd v = a[start + k + len / 2] * w;
          a[start + k] = u + v;
          a[start + k + len / 2] = u - v;
        }
      }
    }
  }
};

// Direct O(n^2) DFT with a cached twiddle table; beats Bluestein's padded
// power-of-two detour for the small prime sizes the 17x17 default grid uses.
struct SmallPlan {
  std::size_t n;
  std::vector<cd> w;  // exp(-2*pi*i*k/n), k < n

  explicit SmallPlan(std::size_t n_) : n(n_), w(n_) {
    for (std::size_t k = 0; k < n; ++k) {
      double ang = -2.0 * std::numbers::pi * static_cast<double>(k) /
                   static_cast<double>(n);
      w[k] = cd(std::cos(ang), std::sin(ang));
    }
  }

  void forward(cd* a) const {
    std::vector<cd> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      cd s{0.0, 0.0};
      std::size_t idx = 0;
      for (std::size_t j = 0; j < n; ++j) {
        s += a[j] * w[idx];
        idx += i;
        if (idx >= n) idx -= n;
      }
      out[i] = s;
    }
    for (std::size_t i = 0; i < n; ++i) a[i] = out[i];
  }
};

struct BluesteinPlan {
  std::size_t n, m;
  Pow2Plan inner;
  std::vector<cd> chirp;      // exp(-i*pi*k^2/n), k < n
  std::vector<cd> chirp_fft;  // forward FFT of the reflected conjugate chirp

  explicit BluesteinPlan(std::size_t n_)
      : n(n_), m(next_pow2(2 * n_ - 1)), inner(m), chirp(n_), chirp_fft(m) {
    for (std::size_t k = 0; k < n; ++k) {
      // k^2 mod 2n keeps the phase argument small for large n.
      std::uint64_t q = (static_cast<std::uint64_t>(k) * k) % (2 * n);
      double ang = -std::numbers::pi * static_cast<double>(q) /
                   static_cast<double>(n);
      chirp[k] = cd(std::cos(ang), std::sin(ang));
    }
    for (auto& c : chirp_fft) c = cd(0.0, 0.0);
    chirp_fft[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
      chirp_fft[k] = std::conj(chirp[k]);
      chirp_fft[m - k] = std::conj(chirp[k]);
    }
    inner.forward(chirp_fft.data());
  }

  void forward(cd* a) const {
    std::vector<cd> buf(m, cd(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) buf[k] = a[k] * chirp[k];
    inner.forward(buf.data());
    for (std::size_t k = 0; k < m; ++k) buf[k] *= chirp_fft[k];
    // inverse of the inner transform via conjugation
    for (auto& c : buf) c = std::conj(c);
    inner.forward(buf.data());
    double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k)
      a[k] = std::conj(buf[k]) * inv_m * chirp[k];
  }
};

struct Plan {
  std::unique_ptr<Pow2Plan> pow2;
  std::unique_ptr<SmallPlan> small;
  std::unique_ptr<BluesteinPlan> bluestein;

  explicit Plan(std::size_t n) {
    if (is_pow2(n))
      pow2 = std::make_unique<Pow2Plan>(n);
    else if (n <= 64)
      small = std::make_unique<SmallPlan>(n);
    else
      bluestein = std::make_unique<BluesteinPlan>(n);
  }

  void forward(cd* a) const {
    if (pow2)
      pow2->forward(a);
    else if (small)
      small->forward(a);
    else
      bluestein->forward(a);
  }
};

inline const Plan& plan_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<Plan>> cache;
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, std::make_unique<Plan>(n)).first;
  return *it->second;
}

}  // namespace detail

// In-place transform of length a.size() >= 1.
inline void transform(std::vector<cd>& a, bool inverse) {
  std::size_t n = a.size();
  if (n <= 1) return;
  if (!inverse) {
    detail::plan_for(n).forward(a.data());
    return;
  }
  for (auto& c : a) c = std::conj(c);
  detail::plan_for(n).forward(a.data());
  double inv_n = 1.0 / static_cast<double>(n);
  for (auto& c : a) c = std::conj(c) * inv_n;
}

// Row-major 2-D transform of a real grid.
inline std::vector<cd> fft2(const Grid& g) {
  const int r = g.rows(), c = g.cols();
  std::vector<cd> s(g.size());
  for (std::size_t t = 0; t < g.size(); ++t) s[t] = cd(g.values()[t], 0.0);
  std::vector<cd> buf;
  buf.resize(static_cast<std::size_t>(c));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) buf[j] = s[static_cast<std::size_t>(i) * c + j];
    transform(buf, false);
    for (int j = 0; j < c; ++j) s[static_cast<std::size_t>(i) * c + j] = buf[j];
  }
  buf.resize(static_cast<std::size_t>(r));
  for (int j = 0; j < c; ++j) {
    for (int i = 0; i < r; ++i) buf[i] = s[static_cast<std::size_t>(i) * c + j];
    transform(buf, false);
    for (int i = 0; i < r; ++i) s[static_cast<std::size_t>(i) * c + j] = buf[i];
  }
  return s;
}

// Inverse 2-D transform; returns the real part.
inline Grid ifft2_real(std::vector<cd> s, int rows, int cols) {
  std::vector<cd> buf;
  buf.resize(static_cast<std::size_t>(cols));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j)
      buf[j] = s[static_cast<std::size_t>(i) * cols + j];
    transform(buf, true);
    for (int j = 0; j < cols; ++j)
      s[static_cast<std::size_t>(i) * cols + j] = buf[j];
  }
  buf.resize(static_cast<std::size_t>(rows));
  Grid out(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i)
      buf[i] = s[static_cast<std::size_t>(i) * cols + j];
    transform(buf, true);
    for (int i = 0; i < rows; ++i) out(i, j) = buf[i].real();
  }
  return out;
}

}  // namespace scf::fft
