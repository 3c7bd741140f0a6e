#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scf/errors.hpp"
#include "scf/io.hpp"

namespace scf {

struct AudioClip {
  std::vector<double> samples;  // scaled to [-1, 1]
  int sample_rate = 0;
};

// 16-bit PCM mono WAV reader: walks the RIFF chunk list (honoring the
// even-byte chunk padding), takes the first fmt and data chunks, and
// rejects everything it cannot represent with a format diagnostic.
inline AudioClip parse_wav(std::string bytes, const std::string& label) {
  io::ByteReader r(std::move(bytes), label);
  if (r.raw(4, "RIFF tag") != "RIFF")
    throw InputError(label + ": not a RIFF file");
  (void)r.u32("RIFF size");
  if (r.raw(4, "WAVE tag") != "WAVE")
    throw InputError(label + ": RIFF file is not WAVE audio");

  bool have_fmt = false, have_data = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::string data;

  while (r.remaining() >= 8) {
    std::string id = r.raw(4, "chunk id");
    std::uint32_t size = r.u32("chunk size");
    if (id == "fmt " && !have_fmt) {
      if (size < 16)
        throw InputError(label + ": fmt chunk of " + std::to_string(size) +
                         " bytes, expected at least 16");
      format = r.u16("audio format");
      channels = r.u16("channel count");
      rate = r.u32("sample rate");
      (void)r.u32("byte rate");
      (void)r.u16("block align");
      bits = r.u16("bits per sample");
      r.skip(size - 16, "fmt extension");
      have_fmt = true;
    } else if (id == "data" && !have_data) {
      data = r.raw(size, "data chunk");
      have_data = true;
    } else {
      r.skip(size, "chunk body");
    }
    if (size % 2 == 1 && !r.exhausted()) r.skip(1, "chunk pad byte");
  }

  if (!have_fmt) throw InputError(label + ": no fmt chunk found");
  if (!have_data) throw InputError(label + ": no data chunk found");
  if (format != 1)
    throw InputError(label + ": unsupported WAV encoding " +
                     std::to_string(format) + ", expected 1 (integer PCM)");
  if (channels != 1)
    throw InputError(label + ": " + std::to_string(channels) +
                     " channels, expected mono");
  if (bits != 16)
    throw InputError(label + ": " + std::to_string(bits) +
                     "-bit samples, expected 16-bit");
  if (rate == 0) throw InputError(label + ": sample rate is zero");
  if (data.size() % 2 != 0)
    throw InputError(label + ": data chunk of " +
                     std::to_string(data.size()) +
                     " bytes holds a partial 16-bit sample");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.reserve(data.size() / 2);
  for (std::size_t i = 0; i + 1 < data.size(); i += 2) {
    std::int16_t s = static_cast<std::int16_t>(
        static_cast<std::uint16_t>(static_cast<std::uint8_t>(data[i])) |
        (static_cast<std::uint16_t>(static_cast<std::uint8_t>(data[i + 1]))
         << 8));
    clip.samples.push_back(static_cast<double>(s) / 32768.0);
  }
  return clip;
}

inline AudioClip load_audio(const std::string& path) {
  return parse_wav(io::read_file(path), path);
}

}  // namespace scf
