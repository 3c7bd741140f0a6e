#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scf/scf.hpp"

namespace {

scf::RunConfig load_config_or_defaults(const std::string& path) {
  if (path.empty()) {
    scf::RunConfig cfg;
    cfg.validate();
    return cfg;
  }
  return scf::load_run_config(path);
}

std::string path_stem(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  return stem.empty() ? std::string("clip") : stem;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw scf::InputError("cannot create directory " + dir + ": " +
                          ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string history_table(const scf::History& h) {
  std::string out = "epoch  train_loss  train_acc  val_loss  val_acc\n";
  for (const scf::EpochStats& e : h) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%5d  %10.6f  %8.2f%%  %8.6f  %6.2f%%\n",
                  e.epoch, e.train_loss, 100.0 * e.train_accuracy, e.val_loss,
                  100.0 * e.val_accuracy);
    out += buf;
  }
  return out;
}

std::string grid_text(const scf::Grid& g) {
  std::string out;
  char buf[32];
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", g(i, j));
      if (j > 0) out += " ";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::unique_ptr<scf::Classifier> build_classifier(
    const scf::RunConfig& cfg, const std::string& kind,
    const scf::EmbeddingDataset& ds, std::uint64_t seed) {
  int da = static_cast<int>(ds.dim_audio);
  int dv = static_cast<int>(ds.dim_visual);
  if (kind == "scf") {
    scf::ScfModel model = scf::build_model(cfg.model, da, dv, seed);
    scf::MlpHead head =
        scf::build_head(model.rows() * model.cols(), cfg.train, seed);
    return std::make_unique<scf::ScfClassifier>(
        std::move(model), std::move(head), cfg.model.trainable);
  }
  return std::make_unique<scf::ConcatClassifier>(
      scf::build_head(da + dv, cfg.train, seed));
}

int cmd_synth(const std::string& config_path, const std::string& out_path) {
  scf::RunConfig cfg = load_config_or_defaults(config_path);
  scf::SynthConfig sc = cfg.synth;
  sc.seed = cfg.seed;
  scf::EmbeddingDataset ds = scf::synth_generate(sc);
  scf::write_dataset(ds, out_path);
  std::printf("wrote %zu instances (audio %u, visual %u) to %s\n",
              ds.instances.size(), ds.dim_audio, ds.dim_visual,
              out_path.c_str());
  return 0;
}

int cmd_spectrogram(const std::string& config_path, const std::string& in_path,
                    const std::string& out_path, bool text) {
  scf::RunConfig cfg = load_config_or_defaults(config_path);
  scf::AudioClip clip = scf::load_audio(in_path);
  scf::SpectrogramConfig sc = cfg.spectrogram;
  sc.sample_rate = clip.sample_rate;
  sc.validate();
  scf::Spectrogram spec = scf::spectrogram(clip.samples, sc);
  if (text) {
    std::string out = "# frames " + std::to_string(spec.frames) + " bins " +
                      std::to_string(spec.bins) + "\n";
    char buf[32];
    for (std::size_t f = 0; f < spec.frames; ++f) {
      for (std::size_t b = 0; b < spec.bins; ++b) {
        std::snprintf(buf, sizeof(buf), "%.9g", spec.at(f, b));
        if (b > 0) out += " ";
        out += buf;
      }
      out += "\n";
    }
    scf::io::write_file(out_path, out);
  } else {
    scf::write_dataset(scf::spectrogram_to_dataset(spec, path_stem(in_path)),
                       out_path);
  }
  std::printf("wrote %zu frames x %zu bins to %s\n", spec.frames, spec.bins,
              out_path.c_str());
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& data_path,
              const std::string& out_dir, const std::string& kind) {
  scf::RunConfig cfg = load_config_or_defaults(config_path);
  scf::EmbeddingDataset ds = scf::read_dataset(data_path);
  ensure_dir(out_dir);

  std::unique_ptr<scf::Classifier> c = build_classifier(cfg, kind, ds, cfg.seed);
  std::vector<std::size_t> all(ds.instances.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  scf::TrainResult result =
      scf::train(*c, ds, all, cfg.train.to_train_config(cfg.seed));

  scf::Checkpoint ck;
  ck.kind = kind;
  ck.config = scf::serialize_run_config(cfg);
  ck.dim_audio = static_cast<int>(ds.dim_audio);
  ck.dim_visual = static_cast<int>(ds.dim_visual);
  ck.trainable = cfg.model.trainable;
  if (kind == "scf")
    ck.model = static_cast<const scf::ScfClassifier&>(*c).model();
  ck.head = kind == "scf"
                ? static_cast<const scf::ScfClassifier&>(*c).head()
                : static_cast<const scf::ConcatClassifier&>(*c).head();
  ck.optimizer = std::move(result.optimizer);
  ck.history = result.history;
  ck.best_epoch = result.best_epoch;
  ck.best_val_loss = result.best_val_loss;

  std::string ckpt_path = join(out_dir, kind + ".ckpt");
  scf::write_checkpoint(ckpt_path, ck);
  scf::io::write_file(join(out_dir, kind + "_history.txt"),
                      history_table(result.history));
  std::printf("%s: best epoch %d, val loss %.6f, checkpoint %s\n",
              kind.c_str(), result.best_epoch, result.best_val_loss,
              ckpt_path.c_str());
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& data_path,
             const std::string& out_dir, const std::string& path_choice) {
  scf::RunConfig cfg = load_config_or_defaults(config_path);
  scf::EmbeddingDataset ds = scf::read_dataset(data_path);
  ensure_dir(out_dir);

  std::vector<std::string> kinds;
  if (path_choice == "both")
    kinds = {"scf", "concat"};
  else
    kinds = {path_choice};

  for (const std::string& kind : kinds) {
    scf::ClassifierFactory factory = [&](std::uint64_t fold_seed) {
      return build_classifier(cfg, kind, ds, fold_seed);
    };
    scf::FoldReport report =
        scf::cross_validate(factory, ds, cfg.train.scenario, cfg.train.folds,
                            cfg.train.to_train_config(cfg.seed));
    std::string text = kind + ", " + scf::to_string(report.scenario) +
                       " scenario, " + std::to_string(cfg.train.folds) +
                       " folds\n" + report.table();
    scf::io::write_file(join(out_dir, "eval_" + kind + ".txt"), text);
    std::printf("%s: %s\n", kind.c_str(), report.summary().c_str());
  }
  return 0;
}

int cmd_gradcheck() {
  scf::SynthConfig sc;
  sc.rows = 5;
  sc.cols = 5;
  sc.dim_audio = 4;
  sc.dim_visual = 4;
  sc.instances = 8;
  sc.groups = 2;
  sc.min_mismatch_distance = 2;
  sc.seed = 42;
  scf::EmbeddingDataset ds = scf::synth_generate(sc);

  scf::ModelConfig mc;
  mc.rows = 5;
  mc.cols = 5;
  mc.steps = 3;
  mc.trainable = {true, true, true, true, true};
  scf::TrainSettings ts;
  ts.hidden = {8};
  scf::ScfModel model = scf::build_model(mc, 4, 4, 42);
  scf::MlpHead head = scf::build_head(25, ts, 42);
  scf::ScfClassifier c(std::move(model), std::move(head), mc.trainable);

  std::vector<std::size_t> batch;
  for (std::size_t i = 0; i < ds.instances.size(); ++i) batch.push_back(i);
  // Gradients below ~1e-6 on a loss of order 1 sit under the roundoff floor
  // of central differences, so they are skipped rather than misjudged.
  scf::GradCheckReport report = scf::gradient_check(c, ds, batch, 1e-5, 1e-6);
  std::printf(
      "checked %zu parameters, max relative error %.3e (segment %s)\n",
      report.parameters_checked, report.max_rel_error,
      report.worst_segment.empty() ? "-" : report.worst_segment.c_str());
  if (!report.ok()) {
    std::fprintf(stderr,
                 "gradient check failed: analytic %.9e vs numeric %.9e at "
                 "%s[%zu]\n",
                 report.worst_analytic, report.worst_numeric,
                 report.worst_segment.c_str(), report.worst_index);
    return 2;
  }
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& ckpt_path,
                 const std::string& stimuli_path, const std::string& out_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(scf::io::read_file(stimuli_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw scf::InputError(stimuli_path + ": " + e.what());
  }
  if (!j.is_object())
    throw scf::InputError(stimuli_path +
                          ": expected an object mapping tags to vectors");
  scf::StimulusSet stimuli;
  for (const auto& item : j.items()) {
    std::vector<double> values;
    try {
      values = item.value().get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw scf::InputError(stimuli_path + ": stimulus \"" + item.key() +
                            "\" is not a numeric vector");
    }
    stimuli.push_back({item.key(), std::move(values)});
  }

  scf::ScfModel model;
  if (!ckpt_path.empty()) {
    scf::Checkpoint ck = scf::read_checkpoint(ckpt_path);
    if (ck.kind != "scf")
      throw scf::InputError(ckpt_path + ": checkpoint holds a \"" + ck.kind +
                            "\" classifier, not a fusion model");
    model = ck.model;
  } else {
    scf::RunConfig cfg = load_config_or_defaults(config_path);
    auto dim_of = [&](const char* tag) {
      const scf::Stimulus* s = scf::find_stimulus(stimuli, tag);
      return s ? static_cast<int>(s->values.size()) : 1;
    };
    model = scf::build_model(cfg.model, dim_of("a"), dim_of("v"), cfg.seed);
  }
  for (const scf::Stimulus& s : stimuli) {
    bool known = false;
    for (const scf::UnimodalArea& a : model.unimodal)
      if (a.tag == s.tag) known = true;
    if (!known)
      throw scf::InputError(stimuli_path + ": stimulus tag \"" + s.tag +
                            "\" matches no model area");
  }

  ensure_dir(out_dir);
  scf::ForwardTrace trace = scf::scf_forward_trace(model, stimuli);
  auto write_steps = [&](const scf::AreaTrace& at, const std::string& name) {
    std::string out;
    for (std::size_t n = 0; n < at.z.size(); ++n) {
      out += "# step " + std::to_string(n) + "\n";
      out += grid_text(at.z[n]);
    }
    scf::io::write_file(join(out_dir, "activity_" + name + ".txt"), out);
  };
  for (std::size_t s = 0; s < model.unimodal.size(); ++s)
    write_steps(trace.uni[s], model.unimodal[s].tag);
  write_steps(trace.multi, "multimodal");
  scf::io::write_file(join(out_dir, "fused.txt"),
                      grid_text(trace.multi.z.back()));
  std::printf("simulated %d steps on a %dx%d grid into %s\n", model.steps,
              model.rows(), model.cols(), out_dir.c_str());
  return 0;
}

int cmd_config(const std::string& out_path) {
  scf::RunConfig cfg;
  std::string text = scf::serialize_run_config(cfg);
  if (out_path.empty())
    std::fputs(text.c_str(), stdout);
  else
    scf::io::write_file(out_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"superior-colliculus fusion layer"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_path, out_dir = ".", in_path;
  std::string ckpt_path, stimuli_path;
  std::string train_kind = "scf", eval_kind = "both";
  bool text = false;

  CLI::App* synth = app.add_subcommand(
      "synth", "generate a synthetic embedding dataset");
  synth->add_option("--config", config_path, "config file (defaults if absent)");
  synth->add_option("--out", out_path, "output dataset path")->required();

  CLI::App* spectrogram = app.add_subcommand(
      "spectrogram", "turn a WAV clip into spectrogram frames");
  spectrogram->add_option("--config", config_path,
                          "config file (defaults if absent)");
  spectrogram->add_option("--in", in_path, "input WAV file")->required();
  spectrogram->add_option("--out", out_path, "output path")->required();
  spectrogram->add_flag("--text", text,
                        "write a plain-text matrix instead of a dataset");

  CLI::App* train = app.add_subcommand(
      "train", "train one classifier on a dataset");
  train->add_option("--config", config_path, "config file (defaults if absent)");
  train->add_option("--data", data_path, "embedding dataset")->required();
  train->add_option("--out-dir", out_dir, "output directory");
  train->add_option("--path", train_kind, "classifier: scf or concat")
      ->check(CLI::IsMember({"scf", "concat"}));

  CLI::App* eval = app.add_subcommand(
      "eval", "cross-validate the fusion path against the baseline");
  eval->add_option("--config", config_path, "config file (defaults if absent)");
  eval->add_option("--data", data_path, "embedding dataset")->required();
  eval->add_option("--out-dir", out_dir, "output directory");
  eval->add_option("--path", eval_kind, "scf, concat, or both")
      ->check(CLI::IsMember({"scf", "concat", "both"}));

  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "verify analytic gradients on a small model");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "run the dynamics on a stimulus file");
  simulate->add_option("--config", config_path,
                       "config file (defaults if absent)");
  simulate->add_option("--ckpt", ckpt_path, "checkpoint to simulate");
  simulate->add_option("--stimuli", stimuli_path,
                       "JSON object mapping area tags to stimulus vectors")
      ->required();
  simulate->add_option("--out-dir", out_dir, "output directory");

  CLI::App* config = app.add_subcommand(
      "config", "print the canonical default configuration");
  config->add_option("--out", out_path, "write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(config_path, out_path);
    if (spectrogram->parsed())
      return cmd_spectrogram(config_path, in_path, out_path, text);
    if (train->parsed())
      return cmd_train(config_path, data_path, out_dir, train_kind);
    if (eval->parsed())
      return cmd_eval(config_path, data_path, out_dir, eval_kind);
    if (gradcheck->parsed()) return cmd_gradcheck();
    if (simulate->parsed())
      return cmd_simulate(config_path, ckpt_path, stimuli_path, out_dir);
    if (config->parsed()) return cmd_config(out_path);
  } catch (const scf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const scf::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const scf::TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
