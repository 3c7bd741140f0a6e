#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "scf/dataset.hpp"
#include "scf/errors.hpp"
#include "scf/fft.hpp"

namespace scf {

enum class Normalization { per_bin_zscore, none };

inline const char* to_string(Normalization n) {
  return n == Normalization::per_bin_zscore ? "per_bin_zscore" : "none";
}

inline Normalization normalization_from_string(const std::string& s) {
  if (s == "per_bin_zscore") return Normalization::per_bin_zscore;
  if (s == "none") return Normalization::none;
  throw ConfigError("unknown normalization \"" + s +
                    "\", expected \"per_bin_zscore\" or \"none\"");
}

struct SpectrogramConfig {
  int sample_rate = 16000;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int transform_size = 512;
  Normalization normalization = Normalization::per_bin_zscore;

  int window_samples() const {
    return static_cast<int>(
        std::lround(static_cast<double>(sample_rate) * window_ms / 1000.0));
  }
  int hop_samples() const {
    return static_cast<int>(
        std::lround(static_cast<double>(sample_rate) * hop_ms / 1000.0));
  }

  void validate() const {
    if (sample_rate <= 0) throw ConfigError("sample_rate must be positive");
    if (transform_size < 2)
      throw ConfigError("transform_size must be at least 2");
    int w = window_samples();
    if (w < 2)
      throw ConfigError("window of " + std::to_string(w) +
                        " samples is too short, need at least 2");
    if (w > transform_size)
      throw ConfigError("window of " + std::to_string(w) +
                        " samples exceeds transform_size " +
                        std::to_string(transform_size));
    if (hop_samples() < 1)
      throw ConfigError("hop must cover at least one sample");
  }
};

// F x B magnitude grid, row-major by frame. Frame times mark window
// centers; bin frequencies follow the transform resolution.
struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> values;
  std::vector<double> frame_times;  // seconds
  std::vector<double> bin_freqs;    // Hz

  double at(std::size_t f, std::size_t b) const {
    return values[f * bins + b];
  }
};

inline std::vector<double> hamming_window(int w) {
  std::vector<double> win(static_cast<std::size_t>(w));
  for (int n = 0; n < w; ++n)
    win[static_cast<std::size_t>(n)] =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (w - 1));
  return win;
}

inline Spectrogram spectrogram(const std::vector<double>& samples,
                               const SpectrogramConfig& cfg) {
  cfg.validate();
  const int w = cfg.window_samples();
  const int hop = cfg.hop_samples();
  const int n = cfg.transform_size;
  if (samples.size() < static_cast<std::size_t>(w))
    throw InputError("clip of " + std::to_string(samples.size()) +
                     " samples is shorter than one window of " +
                     std::to_string(w) + " samples");

  Spectrogram spec;
  spec.frames = (samples.size() - static_cast<std::size_t>(w)) /
                    static_cast<std::size_t>(hop) +
                1;
  spec.bins = static_cast<std::size_t>(n) / 2 + 1;
  spec.values.resize(spec.frames * spec.bins);
  spec.frame_times.resize(spec.frames);
  spec.bin_freqs.resize(spec.bins);
  for (std::size_t b = 0; b < spec.bins; ++b)
    spec.bin_freqs[b] = static_cast<double>(b) *
                        static_cast<double>(cfg.sample_rate) /
                        static_cast<double>(n);

  const std::vector<double> win = hamming_window(w);
  std::vector<fft::cd> buf(static_cast<std::size_t>(n));
  for (std::size_t f = 0; f < spec.frames; ++f) {
    std::size_t start = f * static_cast<std::size_t>(hop);
    spec.frame_times[f] =
        (static_cast<double>(start) + (w - 1) / 2.0) / cfg.sample_rate;
    for (int i = 0; i < w; ++i)
      buf[static_cast<std::size_t>(i)] =
          samples[start + static_cast<std::size_t>(i)] *
          win[static_cast<std::size_t>(i)];
    std::fill(buf.begin() + w, buf.end(), fft::cd(0.0, 0.0));
    fft::transform(buf, false);
    for (std::size_t b = 0; b < spec.bins; ++b)
      spec.values[f * spec.bins + b] = std::abs(buf[b]);
  }

  if (cfg.normalization == Normalization::per_bin_zscore) {
    for (std::size_t b = 0; b < spec.bins; ++b) {
      double mean = 0.0;
      for (std::size_t f = 0; f < spec.frames; ++f)
        mean += spec.values[f * spec.bins + b];
      mean /= static_cast<double>(spec.frames);
      double var = 0.0;
      for (std::size_t f = 0; f < spec.frames; ++f) {
        double d = spec.values[f * spec.bins + b] - mean;
        var += d * d;
      }
      var /= static_cast<double>(spec.frames);
      double sd = std::sqrt(var);
      for (std::size_t f = 0; f < spec.frames; ++f) {
        double& x = spec.values[f * spec.bins + b];
        x = sd > 0.0 ? (x - mean) / sd : 0.0;
      }
    }
  }
  return spec;
}

// Repackages a spectrogram in the dataset container: one record per frame,
// bins as the audio dimension, no visual half. The frame index rides in
// the clip_id; the source name becomes the group.
inline EmbeddingDataset spectrogram_to_dataset(const Spectrogram& spec,
                                               const std::string& clip_name) {
  EmbeddingDataset ds;
  ds.dim_audio = static_cast<std::uint32_t>(spec.bins);
  ds.dim_visual = 0;
  char idbuf[16];
  for (std::size_t f = 0; f < spec.frames; ++f) {
    EmbeddingInstance inst;
    std::snprintf(idbuf, sizeof idbuf, "#%05zu", f);
    inst.clip_id = clip_name + idbuf;
    inst.group_id = clip_name.empty() ? "clip" : clip_name;
    inst.label = 0;
    inst.audio.reserve(spec.bins);
    for (std::size_t b = 0; b < spec.bins; ++b)
      inst.audio.push_back(static_cast<float>(spec.at(f, b)));
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

}  // namespace scf
