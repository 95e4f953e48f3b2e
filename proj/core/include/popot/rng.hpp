#pragma once

#include <cstdint>
#include <random>

namespace popot {

/// Random stream owned by exactly one worker.
using Stream = std::mt19937_64;

/// SplitMix64 finalizer; mixes a 64-bit word into a well-spread seed.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream number `index` of the family rooted at `seed`.
/// `purpose` separates families drawn from the same seed (initial
/// sampling, dynamics, replicas).
inline Stream stream_for(std::uint64_t seed, std::uint64_t index, std::uint64_t purpose = 0) {
  return Stream(mix64(mix64(seed ^ mix64(purpose)) + index));
}

inline double uniform01(Stream& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double exponential(Stream& rng, double rate) {
  return std::exponential_distribution<double>(rate)(rng);
}

}  // namespace popot
