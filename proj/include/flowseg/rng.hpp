#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace flowseg {

// Uniform draw in [0,1) from the engine's raw 64-bit output. std::
// distributions are implementation-defined, which would break the
// byte-identical rerun guarantee, so sampling is done by hand.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline std::uint64_t uniform_index(std::mt19937_64& eng, std::uint64_t n) {
  // Rejection sampling on the top bits; bias-free and portable.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % n;
}

// Standard normal via Box-Muller. One value per call; the cosine twin is
// discarded to keep the draw sequence trivially reproducible.
inline double gaussian(std::mt19937_64& eng) {
  double u1;
  do {
    u1 = uniform01(eng);
  } while (u1 <= 0.0);
  const double u2 = uniform01(eng);
  const double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace flowseg
