#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "scf/area.hpp"
#include "scf/convolution.hpp"
#include "scf/errors.hpp"
#include "scf/io.hpp"
#include "scf/mlp.hpp"
#include "scf/model.hpp"
#include "scf/params.hpp"
#include "scf/rng.hpp"
#include "scf/spectrogram.hpp"
#include "scf/synth.hpp"
#include "scf/train.hpp"

namespace scf {

// Model geometry and coupling defaults; embedding dimensions are not here
// because they come from the dataset a model is built against.
struct ModelConfig {
  int rows = 17;
  int cols = 17;
  int steps = 15;
  ConvMode conv_mode = ConvMode::fast;
  double rf_init_range = 0.05;
  double gain = 10.0;
  double feedback = 1.0;
  AreaParams unimodal;
  AreaParams multimodal;
  TrainableGroups trainable;

  void validate() const {
    if (rows <= 0 || cols <= 0)
      throw ConfigError("model grid dimensions must be positive");
    if (steps < 0) throw ConfigError("steps must be nonnegative");
    if (rf_init_range <= 0.0)
      throw ConfigError("rf_init_range must be positive");
    unimodal.validate();
    multimodal.validate();
  }
};

struct TrainSettings {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 32;
  int max_epochs = 40;
  int patience = 5;
  double validation_fraction = 0.1;
  double dropout = 0.0;
  double threshold = 0.5;
  std::vector<int> hidden{64};
  int folds = 5;
  Scenario scenario = Scenario::independent;

  TrainConfig to_train_config(std::uint64_t seed) const {
    TrainConfig cfg;
    cfg.adam.learning_rate = learning_rate;
    cfg.adam.beta1 = beta1;
    cfg.adam.beta2 = beta2;
    cfg.adam.epsilon = epsilon;
    cfg.batch_size = batch_size;
    cfg.max_epochs = max_epochs;
    cfg.patience = patience;
    cfg.validation_fraction = validation_fraction;
    cfg.threshold = threshold;
    cfg.seed = seed;
    return cfg;
  }

  void validate() const {
    to_train_config(0).validate();
    if (dropout < 0.0 || dropout >= 1.0)
      throw ConfigError("dropout must lie in [0, 1)");
    if (hidden.empty()) throw ConfigError("hidden layer list is empty");
    for (int h : hidden)
      if (h <= 0) throw ConfigError("hidden widths must be positive");
    if (folds < 2) throw ConfigError("folds must be at least 2");
  }
};

// One document drives every subcommand; a single seed pins every random
// choice anywhere in a run.
struct RunConfig {
  std::uint64_t seed = 42;
  std::string output_dir = ".";
  ModelConfig model;
  TrainSettings train;
  SynthConfig synth;
  SpectrogramConfig spectrogram;

  void validate() const {
    model.validate();
    train.validate();
    SynthConfig s = synth;
    s.seed = seed;
    s.validate();
    spectrogram.validate();
  }
};

namespace detail {

inline std::string join_key(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void check_keys(const nlohmann::json& j, const std::string& path,
                       std::initializer_list<const char*> known) {
  if (!j.is_object())
    throw ConfigError("config section \"" + (path.empty() ? "<root>" : path) +
                      "\" must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("unknown config key \"" + join_key(path, item.key()) +
                        "\"");
  }
}

template <class T>
void fetch(const nlohmann::json& j, const std::string& path, const char* key,
           T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key \"" + join_key(path, key) +
                      "\" has the wrong type: " + e.what());
  }
}

inline void fetch_enum(const nlohmann::json& j, const std::string& path,
                       const char* key, ConvMode& out) {
  std::string s;
  fetch(j, path, key, s);
  if (!s.empty()) {
    try {
      out = conv_mode_from_string(s);
    } catch (const ConfigError& e) {
      throw ConfigError("config key \"" + join_key(path, key) +
                        "\": " + e.what());
    }
  }
}

inline void fetch_enum(const nlohmann::json& j, const std::string& path,
                       const char* key, Scenario& out) {
  std::string s;
  fetch(j, path, key, s);
  if (!s.empty()) {
    try {
      out = scenario_from_string(s);
    } catch (const ConfigError& e) {
      throw ConfigError("config key \"" + join_key(path, key) +
                        "\": " + e.what());
    }
  }
}

inline void fetch_enum(const nlohmann::json& j, const std::string& path,
                       const char* key, Normalization& out) {
  std::string s;
  fetch(j, path, key, s);
  if (!s.empty()) {
    try {
      out = normalization_from_string(s);
    } catch (const ConfigError& e) {
      throw ConfigError("config key \"" + join_key(path, key) +
                        "\": " + e.what());
    }
  }
}

inline void parse_area_section(const nlohmann::json& j,
                               const std::string& path, AreaParams& p) {
  check_keys(j, path,
             {"tau", "theta", "slope", "l_ex", "sigma_ex", "l_in",
              "sigma_in"});
  fetch(j, path, "tau", p.tau);
  fetch(j, path, "theta", p.theta);
  fetch(j, path, "slope", p.slope);
  fetch(j, path, "l_ex", p.l_ex);
  fetch(j, path, "sigma_ex", p.sigma_ex);
  fetch(j, path, "l_in", p.l_in);
  fetch(j, path, "sigma_in", p.sigma_in);
}

inline void parse_model_section(const nlohmann::json& j,
                                const std::string& path, ModelConfig& m) {
  check_keys(j, path,
             {"rows", "cols", "steps", "conv_mode", "rf_init_range", "gain",
              "feedback", "unimodal", "multimodal", "trainable"});
  fetch(j, path, "rows", m.rows);
  fetch(j, path, "cols", m.cols);
  fetch(j, path, "steps", m.steps);
  fetch_enum(j, path, "conv_mode", m.conv_mode);
  fetch(j, path, "rf_init_range", m.rf_init_range);
  fetch(j, path, "gain", m.gain);
  fetch(j, path, "feedback", m.feedback);
  if (j.contains("unimodal"))
    parse_area_section(j.at("unimodal"), join_key(path, "unimodal"),
                       m.unimodal);
  if (j.contains("multimodal"))
    parse_area_section(j.at("multimodal"), join_key(path, "multimodal"),
                       m.multimodal);
  if (j.contains("trainable")) {
    const nlohmann::json& t = j.at("trainable");
    std::string tpath = join_key(path, "trainable");
    check_keys(t, tpath,
               {"receptive_fields", "gains", "feedbacks", "lateral", "area"});
    fetch(t, tpath, "receptive_fields", m.trainable.receptive_fields);
    fetch(t, tpath, "gains", m.trainable.gains);
    fetch(t, tpath, "feedbacks", m.trainable.feedbacks);
    fetch(t, tpath, "lateral", m.trainable.lateral);
    fetch(t, tpath, "area", m.trainable.area);
  }
}

inline void parse_train_section(const nlohmann::json& j,
                                const std::string& path, TrainSettings& t) {
  check_keys(j, path,
             {"learning_rate", "beta1", "beta2", "epsilon", "batch_size",
              "max_epochs", "patience", "validation_fraction", "dropout",
              "threshold", "hidden", "folds", "scenario"});
  fetch(j, path, "learning_rate", t.learning_rate);
  fetch(j, path, "beta1", t.beta1);
  fetch(j, path, "beta2", t.beta2);
  fetch(j, path, "epsilon", t.epsilon);
  fetch(j, path, "batch_size", t.batch_size);
  fetch(j, path, "max_epochs", t.max_epochs);
  fetch(j, path, "patience", t.patience);
  fetch(j, path, "validation_fraction", t.validation_fraction);
  fetch(j, path, "dropout", t.dropout);
  fetch(j, path, "threshold", t.threshold);
  fetch(j, path, "hidden", t.hidden);
  fetch(j, path, "folds", t.folds);
  fetch_enum(j, path, "scenario", t.scenario);
}

inline void parse_synth_section(const nlohmann::json& j,
                                const std::string& path, SynthConfig& s) {
  check_keys(j, path,
             {"rows", "cols", "dim_audio", "dim_visual", "noise_sigma",
              "coincidence_rate", "instances", "groups", "signature_sigma",
              "min_mismatch_distance"});
  fetch(j, path, "rows", s.rows);
  fetch(j, path, "cols", s.cols);
  fetch(j, path, "dim_audio", s.dim_audio);
  fetch(j, path, "dim_visual", s.dim_visual);
  fetch(j, path, "noise_sigma", s.noise_sigma);
  fetch(j, path, "coincidence_rate", s.coincidence_rate);
  fetch(j, path, "instances", s.instances);
  fetch(j, path, "groups", s.groups);
  fetch(j, path, "signature_sigma", s.signature_sigma);
  fetch(j, path, "min_mismatch_distance", s.min_mismatch_distance);
}

inline void parse_spectrogram_section(const nlohmann::json& j,
                                      const std::string& path,
                                      SpectrogramConfig& s) {
  check_keys(j, path,
             {"sample_rate", "window_ms", "hop_ms", "transform_size",
              "normalization"});
  fetch(j, path, "sample_rate", s.sample_rate);
  fetch(j, path, "window_ms", s.window_ms);
  fetch(j, path, "hop_ms", s.hop_ms);
  fetch(j, path, "transform_size", s.transform_size);
  fetch_enum(j, path, "normalization", s.normalization);
}

}  // namespace detail

inline RunConfig parse_run_config(const std::string& text,
                                  const std::string& label) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(label + ": " + e.what());
  }
  RunConfig cfg;
  detail::check_keys(j, "",
                     {"seed", "output_dir", "model", "train", "synth",
                      "spectrogram"});
  detail::fetch(j, "", "seed", cfg.seed);
  detail::fetch(j, "", "output_dir", cfg.output_dir);
  if (j.contains("model"))
    detail::parse_model_section(j.at("model"), "model", cfg.model);
  if (j.contains("train"))
    detail::parse_train_section(j.at("train"), "train", cfg.train);
  if (j.contains("synth"))
    detail::parse_synth_section(j.at("synth"), "synth", cfg.synth);
  if (j.contains("spectrogram"))
    detail::parse_spectrogram_section(j.at("spectrogram"), "spectrogram",
                                      cfg.spectrogram);
  cfg.synth.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  return parse_run_config(io::read_file(path), path);
}

inline std::string serialize_run_config(const RunConfig& cfg) {
  nlohmann::json area_u{{"tau", cfg.model.unimodal.tau},
                        {"theta", cfg.model.unimodal.theta},
                        {"slope", cfg.model.unimodal.slope},
                        {"l_ex", cfg.model.unimodal.l_ex},
                        {"sigma_ex", cfg.model.unimodal.sigma_ex},
                        {"l_in", cfg.model.unimodal.l_in},
                        {"sigma_in", cfg.model.unimodal.sigma_in}};
  nlohmann::json area_m{{"tau", cfg.model.multimodal.tau},
                        {"theta", cfg.model.multimodal.theta},
                        {"slope", cfg.model.multimodal.slope},
                        {"l_ex", cfg.model.multimodal.l_ex},
                        {"sigma_ex", cfg.model.multimodal.sigma_ex},
                        {"l_in", cfg.model.multimodal.l_in},
                        {"sigma_in", cfg.model.multimodal.sigma_in}};
  nlohmann::json j{
      {"seed", cfg.seed},
      {"output_dir", cfg.output_dir},
      {"model",
       {{"rows", cfg.model.rows},
        {"cols", cfg.model.cols},
        {"steps", cfg.model.steps},
        {"conv_mode", to_string(cfg.model.conv_mode)},
        {"rf_init_range", cfg.model.rf_init_range},
        {"gain", cfg.model.gain},
        {"feedback", cfg.model.feedback},
        {"unimodal", area_u},
        {"multimodal", area_m},
        {"trainable",
         {{"receptive_fields", cfg.model.trainable.receptive_fields},
          {"gains", cfg.model.trainable.gains},
          {"feedbacks", cfg.model.trainable.feedbacks},
          {"lateral", cfg.model.trainable.lateral},
          {"area", cfg.model.trainable.area}}}}},
      {"train",
       {{"learning_rate", cfg.train.learning_rate},
        {"beta1", cfg.train.beta1},
        {"beta2", cfg.train.beta2},
        {"epsilon", cfg.train.epsilon},
        {"batch_size", cfg.train.batch_size},
        {"max_epochs", cfg.train.max_epochs},
        {"patience", cfg.train.patience},
        {"validation_fraction", cfg.train.validation_fraction},
        {"dropout", cfg.train.dropout},
        {"threshold", cfg.train.threshold},
        {"hidden", cfg.train.hidden},
        {"folds", cfg.train.folds},
        {"scenario", to_string(cfg.train.scenario)}}},
      {"synth",
       {{"rows", cfg.synth.rows},
        {"cols", cfg.synth.cols},
        {"dim_audio", cfg.synth.dim_audio},
        {"dim_visual", cfg.synth.dim_visual},
        {"noise_sigma", cfg.synth.noise_sigma},
        {"coincidence_rate", cfg.synth.coincidence_rate},
        {"instances", cfg.synth.instances},
        {"groups", cfg.synth.groups},
        {"signature_sigma", cfg.synth.signature_sigma},
        {"min_mismatch_distance", cfg.synth.min_mismatch_distance}}},
      {"spectrogram",
       {{"sample_rate", cfg.spectrogram.sample_rate},
        {"window_ms", cfg.spectrogram.window_ms},
        {"hop_ms", cfg.spectrogram.hop_ms},
        {"transform_size", cfg.spectrogram.transform_size},
        {"normalization", to_string(cfg.spectrogram.normalization)}}}};
  return j.dump(2) + "\n";
}

// Assembles the two-area model a RunConfig describes for embeddings of the
// given widths; all receptive fields draw from streams derived from seed.
inline ScfModel build_model(const ModelConfig& mc, int dim_audio,
                            int dim_visual, std::uint64_t seed) {
  mc.validate();
  if (dim_audio <= 0 || dim_visual <= 0)
    throw ConfigError("embedding dimensions must be positive to build a "
                      "model, got " +
                      std::to_string(dim_audio) + " and " +
                      std::to_string(dim_visual));
  ScfModel m;
  m.steps = mc.steps;
  m.conv_mode = mc.conv_mode;
  m.multimodal.params = mc.multimodal;
  m.multimodal.state = AreaState(mc.rows, mc.cols);
  m.multimodal.kernel = make_lateral_kernel(mc.rows, mc.cols, mc.multimodal);
  const std::pair<const char*, int> areas[2] = {{"a", dim_audio},
                                                {"v", dim_visual}};
  for (std::size_t i = 0; i < 2; ++i) {
    UnimodalArea a;
    a.tag = areas[i].first;
    a.params = mc.unimodal;
    a.state = AreaState(mc.rows, mc.cols);
    a.kernel = make_lateral_kernel(mc.rows, mc.cols, mc.unimodal);
    Rng rng(derive_seed(seed, seeds::receptive_field + i));
    a.rf = make_receptive_field(mc.rows, mc.cols, areas[i].second, rng,
                                mc.rf_init_range);
    a.gain = mc.gain;
    a.feedback = mc.feedback;
    m.unimodal.push_back(std::move(a));
  }
  m.validate();
  return m;
}

inline MlpHead build_head(int input_width, const TrainSettings& ts,
                          std::uint64_t seed) {
  Rng rng(derive_seed(seed, seeds::mlp_init));
  return make_mlp_head(input_width, ts.hidden, rng, ts.dropout);
}

}  // namespace scf
