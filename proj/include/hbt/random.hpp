#pragma once

#include <cstdint>
#include <random>

namespace hbt {

using Rng = std::mt19937_64;

/// Seed splitting rule: every independent random stream is keyed by
/// (master seed, stream tag, index) and hashed with the splitmix64 finalizer.
/// Segments and pipeline stages never share a generator, so results do not
/// depend on the order in which segments are scheduled.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (index * 0xd1342543de82ef95ULL + 1));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return derive_seed(derive_seed(master, tag), index);
}

/// Stream tags used across the pipeline.
enum class StreamTag : std::uint64_t {
  FieldNoise = 1,
  Emission = 2,
  BeamSplit = 3,
  Attenuation = 4,
  PairSource = 5,
  Efficiency = 6,
  DarkCounts = 7,
  Jitter = 8,
  Scan = 9,
  Segment = 10,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t index = 0) {
  return derive_seed(master, static_cast<std::uint64_t>(tag), index);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace hbt
