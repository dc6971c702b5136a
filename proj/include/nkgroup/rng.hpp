#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace nkgroup {

// All randomness flows through a 64-bit Mersenne Twister. The conversions to
// doubles and bounded integers are done here rather than with the <random>
// distributions, whose output is implementation-defined, so that a seed yields
// the same stream on every standard library.
using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used only to derive seeds, never as a stream.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Child seed for sub-stream `tag` of `parent`. Distinct tags give unrelated
// seeds, and the result does not depend on the order in which children are
// derived.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  return splitmix64(splitmix64(parent) ^ splitmix64(~tag));
}

// Fixed tags for the sub-streams of one realization.
namespace stream {
inline constexpr std::uint64_t realization = 0x5245414cULL;
inline constexpr std::uint64_t landscape = 0x4c414e44ULL;
inline constexpr std::uint64_t competence = 0x434f4d50ULL;
inline constexpr std::uint64_t trajectory = 0x5452414aULL;
inline constexpr std::uint64_t measurement = 0x4d454153ULL;
inline constexpr std::uint64_t oracle = 0x4f524143ULL;
}  // namespace stream

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on (0, 1]; safe as the argument of log().
inline double uniform_open_closed(Rng& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Uniform integer on [0, bound) by rejection; bound must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

inline bool coin(Rng& rng) { return (rng() >> 63) != 0; }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace nkgroup
