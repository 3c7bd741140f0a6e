#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "scf/classifier.hpp"
#include "scf/errors.hpp"
#include "scf/io.hpp"
#include "scf/lateral.hpp"
#include "scf/mlp.hpp"
#include "scf/model.hpp"
#include "scf/params.hpp"
#include "scf/train.hpp"

namespace scf {

// Everything needed to rebuild a trained classifier and audit how it got
// there. Lateral kernels are derived state and are rebuilt on load.
struct Checkpoint {
  std::string kind;    // "scf" or "concat"
  std::string config;  // canonical config snapshot of the producing run
  int dim_audio = 0;
  int dim_visual = 0;
  TrainableGroups trainable;
  ScfModel model;  // meaningful only when kind == "scf"
  MlpHead head;
  AdamState optimizer;
  History history;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

namespace detail {

inline void write_area_params(io::ByteWriter& w, const AreaParams& p) {
  w.f64(p.tau);
  w.f64(p.theta);
  w.f64(p.slope);
  w.f64(p.l_ex);
  w.f64(p.sigma_ex);
  w.f64(p.l_in);
  w.f64(p.sigma_in);
}

inline AreaParams read_area_params(io::ByteReader& r) {
  AreaParams p;
  p.tau = r.f64("tau");
  p.theta = r.f64("theta");
  p.slope = r.f64("slope");
  p.l_ex = r.f64("l_ex");
  p.sigma_ex = r.f64("sigma_ex");
  p.l_in = r.f64("l_in");
  p.sigma_in = r.f64("sigma_in");
  return p;
}

inline void read_f64_block(io::ByteReader& r, std::vector<double>& out,
                           std::uint64_t count, const std::string& label,
                           const char* what) {
  if (count != 0 && r.remaining() / 8 < count)
    throw InputError(label + ": truncated at byte " + std::to_string(r.pos()) +
                     ": " + std::to_string(count) + " values of " + what +
                     " declared but only " + std::to_string(r.remaining()) +
                     " bytes remain");
  out.resize(count);
  for (double& x : out) x = r.f64(what);
}

}  // namespace detail

inline constexpr std::uint32_t kCheckpointVersion = 1;

inline std::string serialize_checkpoint(const Checkpoint& ck) {
  if (ck.kind != "scf" && ck.kind != "concat")
    throw ConfigError("checkpoint kind must be \"scf\" or \"concat\", got \"" +
                      ck.kind + "\"");
  ck.head.validate();
  io::ByteWriter w;
  w.raw("SCFC", 4);
  w.u32(kCheckpointVersion);
  w.str(ck.kind);
  w.str(ck.config);
  w.u32(static_cast<std::uint32_t>(ck.dim_audio));
  w.u32(static_cast<std::uint32_t>(ck.dim_visual));
  w.u8(ck.trainable.receptive_fields ? 1 : 0);
  w.u8(ck.trainable.gains ? 1 : 0);
  w.u8(ck.trainable.feedbacks ? 1 : 0);
  w.u8(ck.trainable.lateral ? 1 : 0);
  w.u8(ck.trainable.area ? 1 : 0);
  if (ck.kind == "scf") {
    ck.model.validate();
    w.u32(static_cast<std::uint32_t>(ck.model.rows()));
    w.u32(static_cast<std::uint32_t>(ck.model.cols()));
    w.u32(static_cast<std::uint32_t>(ck.model.steps));
    w.u8(ck.model.conv_mode == ConvMode::fast ? 1 : 0);
    detail::write_area_params(w, ck.model.multimodal.params);
    w.u32(static_cast<std::uint32_t>(ck.model.unimodal.size()));
    for (const UnimodalArea& a : ck.model.unimodal) {
      w.str(a.tag);
      detail::write_area_params(w, a.params);
      w.f64(a.gain);
      w.f64(a.feedback);
      w.u32(static_cast<std::uint32_t>(a.rf.dim));
      for (double x : a.rf.w) w.f64(x);
    }
  }
  w.u32(static_cast<std::uint32_t>(ck.head.widths.size()));
  for (int v : ck.head.widths) w.u32(static_cast<std::uint32_t>(v));
  w.f64(ck.head.dropout);
  for (int l = 0; l < ck.head.layers(); ++l) {
    for (double x : ck.head.w[l]) w.f64(x);
    for (double x : ck.head.b[l]) w.f64(x);
  }
  w.u64(static_cast<std::uint64_t>(ck.optimizer.t));
  w.u64(ck.optimizer.m.size());
  for (double x : ck.optimizer.m) w.f64(x);
  for (double x : ck.optimizer.v) w.f64(x);
  w.u32(static_cast<std::uint32_t>(ck.history.size()));
  for (const EpochStats& e : ck.history) {
    w.u32(static_cast<std::uint32_t>(e.epoch));
    w.f64(e.train_loss);
    w.f64(e.train_accuracy);
    w.f64(e.val_loss);
    w.f64(e.val_accuracy);
  }
  w.u32(static_cast<std::uint32_t>(ck.best_epoch));
  w.f64(ck.best_val_loss);
  return w.bytes();
}

inline Checkpoint parse_checkpoint(const std::string& bytes,
                                   const std::string& label) {
  io::ByteReader r(bytes, label);
  if (r.raw(4, "magic") != "SCFC")
    throw InputError(label + ": bad magic, not a checkpoint file");
  std::uint32_t version = r.u32("format version");
  if (version != kCheckpointVersion)
    throw InputError(label + ": unsupported checkpoint version " +
                     std::to_string(version) + ", expected " +
                     std::to_string(kCheckpointVersion));
  Checkpoint ck;
  ck.kind = r.str("classifier kind");
  if (ck.kind != "scf" && ck.kind != "concat")
    throw InputError(label + ": unknown classifier kind \"" + ck.kind + "\"");
  ck.config = r.str("config snapshot");
  ck.dim_audio = static_cast<int>(r.u32("audio dimension"));
  ck.dim_visual = static_cast<int>(r.u32("visual dimension"));
  ck.trainable.receptive_fields = r.u8("trainable receptive_fields") != 0;
  ck.trainable.gains = r.u8("trainable gains") != 0;
  ck.trainable.feedbacks = r.u8("trainable feedbacks") != 0;
  ck.trainable.lateral = r.u8("trainable lateral") != 0;
  ck.trainable.area = r.u8("trainable area") != 0;
  if (ck.kind == "scf") {
    int rows = static_cast<int>(r.u32("grid rows"));
    int cols = static_cast<int>(r.u32("grid cols"));
    if (rows <= 0 || cols <= 0 ||
        static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols) >
            r.remaining())
      throw InputError(label + ": implausible grid " + std::to_string(rows) +
                       "x" + std::to_string(cols));
    ck.model.steps = static_cast<int>(r.u32("steps"));
    std::uint8_t mode = r.u8("convolution mode");
    if (mode > 1)
      throw InputError(label + ": unknown convolution mode " +
                       std::to_string(mode));
    ck.model.conv_mode = mode == 1 ? ConvMode::fast : ConvMode::naive;
    ck.model.multimodal.params = detail::read_area_params(r);
    ck.model.multimodal.state = AreaState(rows, cols);
    ck.model.multimodal.kernel =
        make_lateral_kernel(rows, cols, ck.model.multimodal.params);
    std::uint32_t n_areas = r.u32("area count");
    for (std::uint32_t i = 0; i < n_areas; ++i) {
      UnimodalArea a;
      a.tag = r.str("area tag");
      a.params = detail::read_area_params(r);
      a.gain = r.f64("gain");
      a.feedback = r.f64("feedback");
      a.rf.dim = static_cast<int>(r.u32("receptive field dimension"));
      if (a.rf.dim <= 0)
        throw InputError(label + ": receptive field dimension must be " +
                         "positive, got " + std::to_string(a.rf.dim));
      std::uint64_t n_weights = static_cast<std::uint64_t>(rows) * cols *
                                static_cast<std::uint64_t>(a.rf.dim);
      detail::read_f64_block(r, a.rf.w, n_weights, label,
                             "receptive field weight");
      a.state = AreaState(rows, cols);
      a.kernel = make_lateral_kernel(rows, cols, a.params);
      ck.model.unimodal.push_back(std::move(a));
    }
    ck.model.validate();
  }
  std::uint32_t n_widths = r.u32("head width count");
  if (n_widths > r.remaining())
    throw InputError(label + ": implausible head width count " +
                     std::to_string(n_widths));
  for (std::uint32_t i = 0; i < n_widths; ++i)
    ck.head.widths.push_back(static_cast<int>(r.u32("head width")));
  ck.head.dropout = r.f64("dropout");
  ck.head.validate();
  for (std::size_t l = 0; l + 1 < ck.head.widths.size(); ++l) {
    std::uint64_t in = static_cast<std::uint64_t>(ck.head.widths[l]);
    std::uint64_t out = static_cast<std::uint64_t>(ck.head.widths[l + 1]);
    std::vector<double> wl, bl;
    detail::read_f64_block(r, wl, in * out, label, "head weight");
    detail::read_f64_block(r, bl, out, label, "head bias");
    ck.head.w.push_back(std::move(wl));
    ck.head.b.push_back(std::move(bl));
  }
  ck.optimizer.t = static_cast<std::int64_t>(r.u64("optimizer step count"));
  std::uint64_t n_opt = r.u64("optimizer state size");
  detail::read_f64_block(r, ck.optimizer.m, n_opt, label,
                         "optimizer first moment");
  detail::read_f64_block(r, ck.optimizer.v, n_opt, label,
                         "optimizer second moment");
  std::uint32_t n_history = r.u32("history length");
  for (std::uint32_t i = 0; i < n_history; ++i) {
    EpochStats e;
    e.epoch = static_cast<int>(r.u32("epoch number"));
    e.train_loss = r.f64("train loss");
    e.train_accuracy = r.f64("train accuracy");
    e.val_loss = r.f64("validation loss");
    e.val_accuracy = r.f64("validation accuracy");
    ck.history.push_back(e);
  }
  ck.best_epoch = static_cast<int>(r.u32("best epoch"));
  ck.best_val_loss = r.f64("best validation loss");
  r.expect_end();
  return ck;
}

inline void write_checkpoint(const std::string& path, const Checkpoint& ck) {
  io::write_file(path, serialize_checkpoint(ck));
}

inline Checkpoint read_checkpoint(const std::string& path) {
  return parse_checkpoint(io::read_file(path), path);
}

// Rebuilds the classifier a checkpoint describes, ready for predict calls.
inline std::unique_ptr<Classifier> make_classifier(const Checkpoint& ck) {
  if (ck.kind == "scf")
    return std::make_unique<ScfClassifier>(ck.model, ck.head, ck.trainable);
  if (static_cast<int>(ck.head.widths.front()) !=
      ck.dim_audio + ck.dim_visual)
    throw InputError("checkpoint head expects input width " +
                     std::to_string(ck.head.widths.front()) +
                     " but dimensions sum to " +
                     std::to_string(ck.dim_audio + ck.dim_visual));
  return std::make_unique<ConcatClassifier>(ck.head);
}

}  // namespace scf
