#include "mhd/rng.hpp"

#include <cmath>

namespace mhd {

namespace {

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Xoshiro256ss::Xoshiro256ss(std::uint64_t seed) {
  SplitMix64 sm(seed);
  for (std::uint64_t& w : s) w = sm.next();
}

std::uint64_t Xoshiro256ss::next() {
  const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double Xoshiro256ss::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_cached) {
    has_cached = false;
    return cached;
  }
  // u1 in (0, 1]: adding one to the 53-bit mantissa excludes zero.
  const double u1 = static_cast<double>((gen.next() >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(gen.next() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * pi * u2;
  cached = r * std::sin(a);
  has_cached = true;
  return r * std::cos(a);
}

RVec make_initial_coeffs(int n, int elmax, std::uint64_t seed, bool zero_momentum) {
  if (n < 2) throw std::invalid_argument("make_initial_coeffs: n must be >= 2");
  if (elmax < 1 || elmax >= n)
    throw std::invalid_argument("make_initial_coeffs: requires 1 <= elmax <= n-1");

  const int n_draw = (elmax + 1) * (elmax + 1);
  NormalStream normals(seed);
  RVec coeffs = RVec::Zero(static_cast<long>(n) * n);
  for (int k = 0; k < n_draw; ++k) coeffs[k] = normals.next();

  coeffs[0] = 0.0;
  if (zero_momentum) coeffs.segment(1, 3).setZero();
  return coeffs;
}

}  // namespace mhd
