// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ropelab::rng {

// std::mt19937_64 output is pinned bit-for-bit by the C++ standard, so it is
// a portable deterministic source. The mappings below are hand-rolled because
// the standard distributions are not portable across library implementations.

// SplitMix64-style hash used to derive independent sub-stream seeds (one per
// weight stack, one per sequence, ...) from a single user seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform in [-bound, bound).
inline double uniform_pm(std::mt19937_64& g, double bound) {
  return (2.0 * uniform01(g) - 1.0) * bound;
}

// Uniform integer in [0, n) by masked rejection (no modulo bias).
inline std::uint64_t below(std::mt19937_64& g, std::uint64_t n) {
  assert(n > 0);
  if (n == 1) return 0;
  const int bits = 64 - std::countl_zero(n - 1);
  const std::uint64_t mask = (bits == 64) ? ~0ULL : ((1ULL << bits) - 1ULL);
  for (;;) {
    const std::uint64_t x = g() & mask;
    if (x < n) return x;
  }
}

// Standard normal via Box-Muller. The sine partner is discarded so each call
// consumes exactly two engine draws, keeping call sites stateless.
inline double gaussian(std::mt19937_64& g) {
  const double u1 = (static_cast<double>(g() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform01(g);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ropelab::rng
