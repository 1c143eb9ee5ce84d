#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Deterministic randomness utilities.
//
// All stochastic code in this library draws from std::mt19937_64 through the
// helpers below.  The engine's output sequence for a given seed is fully
// specified by the C++ standard, and the uniform/normal transforms here are
// hand-written, so every sampled quantity is reproducible bit-for-bit across
// platforms and across thread counts (each logical stream gets its own
// engine, seeded independently of scheduling order).

namespace trunctail::rng {

using Engine = std::mt19937_64;

// 64-bit finalizing mixer (the SplitMix64 output function).  Small or highly
// structured inputs (0, 1, 2, ...) come out decorrelated.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Stream seed derived from a master seed plus up to three coordinates
// (e.g. grid cell, replicate, retry attempt).  Every coordinate tuple maps to
// an unrelated seed, so work can be scheduled across threads in any order
// without changing any stream's draws.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t c0,
                                 std::uint64_t c1 = 0, std::uint64_t c2 = 0) {
  std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc909ull);
  h = mix64(h ^ mix64(c0 + 0x243f6a8885a308d3ull));
  h = mix64(h ^ mix64(c1 + 0x13198a2e03707344ull));
  h = mix64(h ^ mix64(c2 + 0xa4093822299f31d0ull));
  return h;
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

// Uniform draw in the open interval (0, 1): the top 53 bits of one engine
// output, offset by half a grid step.  0 and 1 are unreachable, so quantile
// transforms of the result are always finite.
inline double unit_open(Engine& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via the Box-Muller transform.  Consumes exactly two
// uniforms per call (no cached spare), keeping per-stream consumption
// patterns simple and deterministic.
inline double normal(Engine& eng) {
  const double u1 = unit_open(eng);
  const double u2 = unit_open(eng);
  constexpr double two_pi = 6.28318530717958647692528676655900577;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace trunctail::rng
