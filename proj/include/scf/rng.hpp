#pragma once

#include <cstdint>
#include <random>

namespace scf {

using Rng = std::mt19937_64;

// splitmix64 finalizer; decorrelates derived stream seeds from a root seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(root ^ splitmix64(stream));
}

// Fixed stream tags. Every random decision in the project draws from a
// generator seeded as derive_seed(root_seed, tag [+ index]), so one root
// seed pins every artifact byte-for-byte.
namespace seeds {
inline constexpr std::uint64_t synth = 0x01;
inline constexpr std::uint64_t receptive_field = 0x100;  // + area index
inline constexpr std::uint64_t mlp_init = 0x200;
inline constexpr std::uint64_t validation_split = 0x301;
inline constexpr std::uint64_t epoch_shuffle = 0x400;  // + epoch
inline constexpr std::uint64_t dropout = 0x500;
inline constexpr std::uint64_t fold_split = 0x601;
inline constexpr std::uint64_t fold_run = 0x700;  // + fold index
}  // namespace seeds

}  // namespace scf
