#pragma once

// Seeded, portable pseudo-random generation for initial data.
//
// The integer stream is xoshiro256** (Blackman & Vigna, public domain),
// with its four state words seeded from consecutive SplitMix64 outputs.
// Both algorithms are pinned here by their constants so the stream of
// uint64 values is bit-identical across platforms and compilers.
// Standard normals come from the classic (trigonometric) Box-Muller
// transform; they additionally depend on libm's sqrt/log/cos/sin.

#include <cstdint>

#include "mhd/common.hpp"

namespace mhd {

// x += 0x9E3779B97F4A7C15; then xor-shift/multiply mixing with
// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
};

struct Xoshiro256ss {
  std::uint64_t s[4] = {0, 0, 0, 0};

  explicit Xoshiro256ss(std::uint64_t seed);
  std::uint64_t next();
  // Uniform double in [0, 1): the top 53 bits of next(), times 2^-53.
  double uniform();
};

// Each Box-Muller invocation consumes two uint64 draws and yields two
// normals; the sine branch is cached and returned by the following call.
// The radial uniform maps to (0, 1] so the logarithm is always finite.
struct NormalStream {
  Xoshiro256ss gen;
  double cached = 0.0;
  bool has_cached = false;

  explicit NormalStream(std::uint64_t seed) : gen(seed) {}
  double next();
};

// Random real spherical-harmonic coefficients in flat order k = l^2+l+m:
// draws exactly (elmax+1)^2 normals from NormalStream(seed), then zeroes
// the mean component k = 0, zeroes the angular-momentum components
// k = 1..3 when zero_momentum, and zero-pads to length n^2.
// Requires n >= 2 and 1 <= elmax <= n-1.
RVec make_initial_coeffs(int n, int elmax, std::uint64_t seed, bool zero_momentum);

}  // namespace mhd
