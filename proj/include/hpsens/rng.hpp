#pragma once

#include <cstdint>
#include <random>

namespace hps {

/// SplitMix64 finalizer; a bijective mixer on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `stream` under `master`. Streams are addressed by
/// counter so parallel consumers never depend on scheduling order.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix64(mix64(master) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t stream) {
  return std::mt19937_64(substream_seed(master, stream));
}

}  // namespace hps
