#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Raw-byte WAV assembly, intentionally independent of the library's reader
// so the tests exercise the format contract rather than an internal writer.

namespace scf::testutil {

inline void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct WavSpec {
  std::uint16_t format = 1;
  std::uint16_t channels = 1;
  std::uint32_t sample_rate = 16000;
  std::uint16_t bits = 16;
  std::string extra_chunk_id;  // inserted before fmt when nonempty
  std::string extra_chunk_body;
};

inline std::string wav_bytes(const std::vector<std::int16_t>& samples,
                             const WavSpec& spec = {}) {
  std::string data;
  for (std::int16_t s : samples)
    put_u16(data, static_cast<std::uint16_t>(s));

  std::string fmt;
  put_u16(fmt, spec.format);
  put_u16(fmt, spec.channels);
  put_u32(fmt, spec.sample_rate);
  std::uint32_t bytes_per_frame =
      static_cast<std::uint32_t>(spec.channels) * spec.bits / 8;
  put_u32(fmt, spec.sample_rate * bytes_per_frame);
  put_u16(fmt, static_cast<std::uint16_t>(bytes_per_frame));
  put_u16(fmt, spec.bits);

  std::string body = "WAVE";
  if (!spec.extra_chunk_id.empty()) {
    body += spec.extra_chunk_id;
    put_u32(body, static_cast<std::uint32_t>(spec.extra_chunk_body.size()));
    body += spec.extra_chunk_body;
    if (spec.extra_chunk_body.size() % 2 == 1) body.push_back('\0');
  }
  body += "fmt ";
  put_u32(body, static_cast<std::uint32_t>(fmt.size()));
  body += fmt;
  body += "data";
  put_u32(body, static_cast<std::uint32_t>(data.size()));
  body += data;
  if (data.size() % 2 == 1) body.push_back('\0');

  std::string out = "RIFF";
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out += body;
  return out;
}

}  // namespace scf::testutil
