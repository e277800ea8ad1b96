// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ropelab/precision.hpp"

namespace ropelab {

// How the rotation pairs up vector components.
//   chunked:    adjacent pairs (v[2i], v[2i+1]) share frequency i.
//   half_split: pairs (v[i], v[i + d/2]) share frequency i.
enum class RotaryLayout { chunked, half_split };

// Frequency table for a rotary embedding over vectors of even length
// head_dim: freqs[i] = base^(-2i / head_dim), i in [0, head_dim/2).
// freqs[0] is always exactly 1.
struct RotaryConfig {
  int head_dim = 0;
  double base = 0.0;
  RotaryLayout layout = RotaryLayout::chunked;
  std::vector<double> freqs;
};

// Position offset added to both query and key positions. In exact arithmetic
// logits depend only on position differences, so any shift is a no-op; in
// narrower formats it is not, which is the effect this library measures.
struct PositionShift {
  std::int64_t delta = 0;
};

// Throws ConfigError unless head_dim is even and >= 2 and base is a finite
// positive value.
RotaryConfig make_rotary_config(int head_dim, double base,
                                RotaryLayout layout = RotaryLayout::chunked);

// Largest position magnitude accepted by rotate(): beyond 2^53 a position is
// no longer exactly representable in double and angle computation silently
// loses integer precision, so it is refused instead.
inline constexpr std::int64_t kMaxRotaryPosition = 1LL << 53;

// Rotate `v` to position `pos` in the given arithmetic format.
//
// Inputs are first rounded to the format. Each pair (a, b) becomes
// (a*c - b*s, a*s + b*c) with that exact operation order, where the angle
// pos * freqs[i] is formed in f64, rounded to the format, and cos/sin are
// evaluated in the format. Position 0 performs no arithmetic at all: values
// only pass through the input rounding.
std::vector<double> rotate(std::span<const double> v, std::int64_t pos,
                           const RotaryConfig& config, Real precision);

// As above but writing into caller storage; `in` and `out` may alias.
void rotate_into(std::span<const double> in, std::span<double> out,
                 std::int64_t pos, const RotaryConfig& config, Real precision);

// Single attention logit between query q at position i and key k at position
// j, both shifted by `shift`, under the full stage policy: rotation in the
// rotation format, results rounded to the q/k storage format, then a
// fixed-tree dot product in the accumulation format. Returns the logit as
// double (exact widening). No 1/sqrt(d) scaling is applied.
double rope_logit(std::span<const double> q, std::span<const double> k,
                  std::int64_t i, std::int64_t j, PositionShift shift,
                  const RotaryConfig& config, const PrecisionPolicy& policy);

const char* to_string(RotaryLayout layout);

}  // namespace ropelab
