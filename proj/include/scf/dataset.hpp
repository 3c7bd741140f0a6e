#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "scf/errors.hpp"
#include "scf/io.hpp"
#include "scf/rng.hpp"

namespace scf {

// One labeled multimodal example. Embeddings are kept as 32-bit floats so a
// dataset round-trips through its file format bit-exactly.
struct EmbeddingInstance {
  std::string clip_id;
  std::string group_id;
  std::uint8_t label = 0;  // 1 = speaking
  std::vector<float> audio;
  std::vector<float> visual;

  bool operator==(const EmbeddingInstance&) const = default;
};

struct EmbeddingDataset {
  std::uint32_t dim_audio = 0;
  std::uint32_t dim_visual = 0;
  std::vector<EmbeddingInstance> instances;

  bool operator==(const EmbeddingDataset&) const = default;

  void validate() const {
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const EmbeddingInstance& inst = instances[i];
      if (inst.group_id.empty())
        throw InputError("instance " + std::to_string(i) +
                         " has an empty group_id");
      if (inst.label > 1)
        throw InputError("instance " + std::to_string(i) + " has label " +
                         std::to_string(inst.label) + ", expected 0 or 1");
      if (inst.audio.size() != dim_audio || inst.visual.size() != dim_visual)
        throw InputError("instance " + std::to_string(i) +
                         " dimensions disagree with the dataset header");
    }
    std::vector<std::string> ids;
    ids.reserve(instances.size());
    for (const EmbeddingInstance& inst : instances) ids.push_back(inst.clip_id);
    std::sort(ids.begin(), ids.end());
    auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end())
      throw InputError("duplicate clip_id \"" + *dup + "\"");
  }
};

inline std::vector<double> widen(const std::vector<float>& v) {
  return std::vector<double>(v.begin(), v.end());
}

// Variable-length visual sequence with per-slot validity flags; padded
// slots never contribute to pooled values.
struct SequenceBundle {
  std::vector<std::vector<float>> frames;
  std::vector<bool> mask;
};

inline std::vector<float> pooled_visual(const SequenceBundle& bundle) {
  if (bundle.frames.size() != bundle.mask.size())
    throw InputError("sequence mask length differs from frame count");
  std::vector<double> acc;
  std::size_t valid = 0;
  for (std::size_t f = 0; f < bundle.frames.size(); ++f) {
    if (!bundle.mask[f]) continue;
    if (acc.empty()) acc.assign(bundle.frames[f].size(), 0.0);
    if (bundle.frames[f].size() != acc.size())
      throw InputError("sequence frames have inconsistent dimensions");
    for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += bundle.frames[f][d];
    ++valid;
  }
  if (valid == 0) throw InputError("sequence has no valid frames to pool");
  std::vector<float> out(acc.size());
  for (std::size_t d = 0; d < acc.size(); ++d)
    out[d] = static_cast<float>(acc[d] / static_cast<double>(valid));
  return out;
}

// --- SCFE file format -------------------------------------------------
// magic "SCFE", u32 version, u32 count, u32 dim_audio, u32 dim_visual,
// then per record: clip_id (u32 length + bytes), group_id (u32 length +
// bytes), u8 label, dim_audio f32 values, dim_visual f32 values. All
// integers and floats little-endian.

inline constexpr char kDatasetMagic[4] = {'S', 'C', 'F', 'E'};
inline constexpr std::uint32_t kDatasetVersion = 1;

inline std::string serialize_dataset(const EmbeddingDataset& ds) {
  ds.validate();
  io::ByteWriter w;
  w.raw(kDatasetMagic, 4);
  w.u32(kDatasetVersion);
  w.u32(static_cast<std::uint32_t>(ds.instances.size()));
  w.u32(ds.dim_audio);
  w.u32(ds.dim_visual);
  for (const EmbeddingInstance& inst : ds.instances) {
    w.str(inst.clip_id);
    w.str(inst.group_id);
    w.u8(inst.label);
    for (float x : inst.audio) w.f32(x);
    for (float x : inst.visual) w.f32(x);
  }
  return w.bytes();
}

inline EmbeddingDataset parse_dataset(std::string bytes,
                                      const std::string& label) {
  io::ByteReader r(std::move(bytes), label);
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.u8("magic"));
  if (!std::equal(magic, magic + 4, kDatasetMagic))
    throw InputError(label + ": bad magic, not an SCFE dataset");
  std::uint32_t version = r.u32("version");
  if (version != kDatasetVersion)
    throw InputError(label + ": unsupported format version " +
                     std::to_string(version));
  EmbeddingDataset ds;
  std::uint32_t count = r.u32("instance count");
  ds.dim_audio = r.u32("audio dimension");
  ds.dim_visual = r.u32("visual dimension");
  // Cheapest possible record: two empty ids, label, and the embeddings.
  // Checking up front keeps a corrupt header from driving allocations.
  std::uint64_t min_record =
      9 + 4 * (static_cast<std::uint64_t>(ds.dim_audio) +
               static_cast<std::uint64_t>(ds.dim_visual));
  if (count != 0 &&
      static_cast<std::uint64_t>(r.remaining()) / count < min_record)
    throw InputError(label + ": truncated at byte " + std::to_string(r.pos()) +
                     ": header declares " + std::to_string(count) +
                     " instances needing at least " +
                     std::to_string(min_record) + " bytes each but only " +
                     std::to_string(r.remaining()) + " remain");
  ds.instances.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    EmbeddingInstance inst;
    inst.clip_id = r.str("clip_id");
    inst.group_id = r.str("group_id");
    inst.label = r.u8("label");
    inst.audio.resize(ds.dim_audio);
    for (float& x : inst.audio) x = r.f32("audio value");
    inst.visual.resize(ds.dim_visual);
    for (float& x : inst.visual) x = r.f32("visual value");
    ds.instances.push_back(std::move(inst));
  }
  r.expect_end();
  ds.validate();
  return ds;
}

inline void write_dataset(const EmbeddingDataset& ds,
                          const std::string& path) {
  io::write_file(path, serialize_dataset(ds));
}

inline EmbeddingDataset read_dataset(const std::string& path) {
  return parse_dataset(io::read_file(path), path);
}

// --- fold assignment ---------------------------------------------------

enum class Scenario { dependent, independent };

inline const char* to_string(Scenario s) {
  return s == Scenario::dependent ? "dependent" : "independent";
}

inline Scenario scenario_from_string(const std::string& s) {
  if (s == "dependent") return Scenario::dependent;
  if (s == "independent") return Scenario::independent;
  throw ConfigError("unknown scenario \"" + s +
                    "\", expected \"dependent\" or \"independent\"");
}

// Per-fold held-out identifiers: clip_ids in the dependent scenario,
// group_ids in the independent one.
struct FoldAssignment {
  Scenario scenario = Scenario::independent;
  std::vector<std::vector<std::string>> test_ids;
};

// Train/test instance indices realized from an assignment.
struct FoldIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

inline FoldAssignment split_groups(const EmbeddingDataset& ds,
                                   Scenario scenario, int k,
                                   std::uint64_t seed) {
  if (k < 2) throw InputError("fold count must be at least 2");
  FoldAssignment fa;
  fa.scenario = scenario;
  fa.test_ids.resize(static_cast<std::size_t>(k));
  Rng rng(seed);
  if (scenario == Scenario::dependent) {
    if (ds.instances.size() < static_cast<std::size_t>(k))
      throw InputError("dataset has " + std::to_string(ds.instances.size()) +
                       " instances, fewer than " + std::to_string(k) +
                       " folds");
    // Stratify by label so each fold sees both classes where possible.
    std::vector<std::size_t> by_label[2];
    for (std::size_t i = 0; i < ds.instances.size(); ++i)
      by_label[ds.instances[i].label].push_back(i);
    int fold = 0;
    for (auto& idx : by_label) {
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t i : idx) {
        fa.test_ids[static_cast<std::size_t>(fold)].push_back(
            ds.instances[i].clip_id);
        fold = (fold + 1) % k;
      }
    }
  } else {
    std::vector<std::string> groups;  // first-appearance order
    for (const EmbeddingInstance& inst : ds.instances)
      if (std::find(groups.begin(), groups.end(), inst.group_id) ==
          groups.end())
        groups.push_back(inst.group_id);
    if (groups.size() < static_cast<std::size_t>(k))
      throw InputError("independent scenario needs at least " +
                       std::to_string(k) + " distinct groups, found " +
                       std::to_string(groups.size()));
    std::shuffle(groups.begin(), groups.end(), rng);
    for (std::size_t g = 0; g < groups.size(); ++g)
      fa.test_ids[g % static_cast<std::size_t>(k)].push_back(groups[g]);
  }
  for (auto& ids : fa.test_ids) std::sort(ids.begin(), ids.end());
  return fa;
}

inline std::vector<FoldIndices> materialize_folds(const EmbeddingDataset& ds,
                                                  const FoldAssignment& fa) {
  std::vector<FoldIndices> folds(fa.test_ids.size());
  for (std::size_t f = 0; f < fa.test_ids.size(); ++f) {
    const std::vector<std::string>& ids = fa.test_ids[f];
    for (std::size_t i = 0; i < ds.instances.size(); ++i) {
      const std::string& key = fa.scenario == Scenario::dependent
                                   ? ds.instances[i].clip_id
                                   : ds.instances[i].group_id;
      if (std::binary_search(ids.begin(), ids.end(), key))
        folds[f].test.push_back(i);
      else
        folds[f].train.push_back(i);
    }
  }
  return folds;
}

}  // namespace scf
