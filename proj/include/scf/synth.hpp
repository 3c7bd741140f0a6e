#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "scf/convolution.hpp"
#include "scf/dataset.hpp"
#include "scf/errors.hpp"
#include "scf/grid.hpp"
#include "scf/lateral.hpp"
#include "scf/rng.hpp"

namespace scf {

// Synthetic stand-in for the deep extractors: each grid location gets one
// signature vector per modality, instances encode a location in each
// modality, and the label says whether the two locations coincide. Neither
// modality alone carries label information; only their agreement does.
struct SynthConfig {
  int rows = 17;
  int cols = 17;
  int dim_audio = 128;
  int dim_visual = 128;
  double noise_sigma = 0.1;
  double coincidence_rate = 0.5;  // fraction of positive instances
  int instances = 4000;
  int groups = 20;
  std::uint64_t seed = 42;
  // Signatures are white noise smoothed over the grid with this spread, so
  // nearby locations have correlated signatures and held-out locations stay
  // decodable from their neighbors; that is what makes the group-independent
  // scenario winnable at all.
  double signature_sigma = 1.0;
  // Mismatch locations keep at least this circular Euclidean distance from
  // the encoded location, avoiding near-coincidence label noise.
  int min_mismatch_distance = 3;

  void validate() const {
    if (rows <= 0 || cols <= 0)
      throw ConfigError("synth grid dimensions must be positive");
    if (dim_audio <= 0 || dim_visual <= 0)
      throw ConfigError("synth embedding dimensions must be positive");
    if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
    if (!(coincidence_rate > 0.0 && coincidence_rate < 1.0))
      throw ConfigError("coincidence_rate must lie strictly between 0 and 1");
    if (instances <= 0) throw ConfigError("instances must be positive");
    if (groups <= 0) throw ConfigError("groups must be positive");
    if (signature_sigma <= 0.0)
      throw ConfigError("signature_sigma must be positive");
    if (min_mismatch_distance < 1)
      throw ConfigError("min_mismatch_distance must be at least 1");
  }
};

// Generation internals exposed for diagnostics: per-location signatures,
// the location->group map, and each instance's encoded locations.
struct SynthTrace {
  std::vector<std::vector<double>> audio_signature;
  std::vector<std::vector<double>> visual_signature;
  std::vector<int> group_of_location;
  std::vector<int> audio_location;
  std::vector<int> visual_location;
};

namespace detail {

inline std::vector<std::vector<double>> smooth_signatures(int rows, int cols,
                                                          int dim,
                                                          double sigma,
                                                          Rng& rng) {
  Grid blur(rows, cols);
  for (int a = 0; a < rows; ++a)
    for (int b = 0; b < cols; ++b) {
      double dx = circular_distance(a, 0, rows);
      double dy = circular_distance(b, 0, cols);
      blur(a, b) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  const std::size_t cells = blur.size();
  std::vector<std::vector<double>> sig(cells, std::vector<double>(dim));
  std::normal_distribution<double> normal(0.0, 1.0);
  Grid noise(rows, cols);
  for (int d = 0; d < dim; ++d) {
    for (double& x : noise.values()) x = normal(rng);
    Grid surface = circular_convolve_grids(blur, noise, ConvMode::fast);
    double mean = grid_sum(surface) / static_cast<double>(cells);
    double var = 0.0;
    for (double x : surface.values()) var += (x - mean) * (x - mean);
    var /= static_cast<double>(cells);
    double sd = std::sqrt(var);
    for (std::size_t c = 0; c < cells; ++c)
      sig[c][d] = sd > 0.0 ? (surface.values()[c] - mean) / sd : 0.0;
  }
  return sig;
}

}  // namespace detail

inline EmbeddingDataset synth_generate(const SynthConfig& cfg,
                                       SynthTrace* trace = nullptr) {
  cfg.validate();
  const int locations = cfg.rows * cfg.cols;
  if (cfg.groups > locations)
    throw InputError("grid of " + std::to_string(locations) +
                     " locations is too small for " +
                     std::to_string(cfg.groups) + " groups");
  std::vector<std::pair<int, int>> mismatch_offsets;
  const int min_d2 = cfg.min_mismatch_distance * cfg.min_mismatch_distance;
  for (int di = 0; di < cfg.rows; ++di)
    for (int dj = 0; dj < cfg.cols; ++dj) {
      int dx = circular_distance(di, 0, cfg.rows);
      int dy = circular_distance(dj, 0, cfg.cols);
      if (dx * dx + dy * dy >= min_d2) mismatch_offsets.emplace_back(di, dj);
    }
  if (mismatch_offsets.empty())
    throw InputError("grid too small: no location pair reaches mismatch "
                     "distance " +
                     std::to_string(cfg.min_mismatch_distance));

  Rng rng(derive_seed(cfg.seed, seeds::synth));
  auto audio_sig = detail::smooth_signatures(cfg.rows, cfg.cols,
                                             cfg.dim_audio,
                                             cfg.signature_sigma, rng);
  auto visual_sig = detail::smooth_signatures(cfg.rows, cfg.cols,
                                              cfg.dim_visual,
                                              cfg.signature_sigma, rng);

  // Spatially interleaved group map: a held-out group's locations keep
  // trained neighbors, mirroring unseen speakers who still resemble seen
  // ones.
  std::vector<int> location_order(static_cast<std::size_t>(locations));
  std::iota(location_order.begin(), location_order.end(), 0);
  std::shuffle(location_order.begin(), location_order.end(), rng);
  std::vector<int> group_of_location(static_cast<std::size_t>(locations));
  for (int i = 0; i < locations; ++i)
    group_of_location[static_cast<std::size_t>(location_order[i])] =
        i % cfg.groups;

  EmbeddingDataset ds;
  ds.dim_audio = static_cast<std::uint32_t>(cfg.dim_audio);
  ds.dim_visual = static_cast<std::uint32_t>(cfg.dim_visual);
  ds.instances.reserve(static_cast<std::size_t>(cfg.instances));

  std::uniform_int_distribution<int> loc_dist(0, locations - 1);
  std::uniform_int_distribution<std::size_t> off_dist(
      0, mismatch_offsets.size() - 1);
  std::bernoulli_distribution coin(cfg.coincidence_rate);
  std::normal_distribution<double> normal(0.0, 1.0);

  if (trace) {
    trace->audio_signature = audio_sig;
    trace->visual_signature = visual_sig;
    trace->group_of_location = group_of_location;
    trace->audio_location.clear();
    trace->visual_location.clear();
  }

  char idbuf[32];
  for (int i = 0; i < cfg.instances; ++i) {
    int loc = loc_dist(rng);
    bool positive = coin(rng);
    int vloc = loc;
    if (!positive) {
      auto [di, dj] = mismatch_offsets[off_dist(rng)];
      int r = (loc / cfg.cols + di) % cfg.rows;
      int c = (loc % cfg.cols + dj) % cfg.cols;
      vloc = r * cfg.cols + c;
    }
    EmbeddingInstance inst;
    std::snprintf(idbuf, sizeof idbuf, "c%06d", i);
    inst.clip_id = idbuf;
    std::snprintf(idbuf, sizeof idbuf, "g%03d",
                  group_of_location[static_cast<std::size_t>(loc)]);
    inst.group_id = idbuf;
    inst.label = positive ? 1 : 0;
    inst.audio.resize(static_cast<std::size_t>(cfg.dim_audio));
    for (int d = 0; d < cfg.dim_audio; ++d)
      inst.audio[static_cast<std::size_t>(d)] = static_cast<float>(
          audio_sig[static_cast<std::size_t>(loc)][static_cast<std::size_t>(d)] +
          cfg.noise_sigma * normal(rng));
    inst.visual.resize(static_cast<std::size_t>(cfg.dim_visual));
    for (int d = 0; d < cfg.dim_visual; ++d)
      inst.visual[static_cast<std::size_t>(d)] = static_cast<float>(
          visual_sig[static_cast<std::size_t>(vloc)]
                    [static_cast<std::size_t>(d)] +
          cfg.noise_sigma * normal(rng));
    if (trace) {
      trace->audio_location.push_back(loc);
      trace->visual_location.push_back(vloc);
    }
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

}  // namespace scf
