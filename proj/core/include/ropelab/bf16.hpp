// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>

namespace ropelab {

// 16-bit brain float: 1 sign bit, 8 exponent bits, 7 mantissa bits.
// A bf16 value is exactly the top half of the corresponding binary32 bit
// pattern, so widening is positional bit arithmetic and every bf16 value is
// also a binary32 value. Subnormals are kept as-is (no flush to zero), which
// makes encode(decode(w)) == w for all 65536 patterns.
struct Bf16Word {
  std::uint16_t bits = 0;

  friend bool operator==(Bf16Word, Bf16Word) = default;
};

// Exact widening: the pattern becomes the top 16 bits, low 16 bits zero.
inline float decode_bf16(Bf16Word w) {
  return std::bit_cast<float>(static_cast<std::uint32_t>(w.bits) << 16);
}

// Round a binary32 value to the nearest bf16, ties to even.
//
// Adding 0x7fff plus the parity of bit 16 and then truncating implements
// round-to-nearest-even in a single carry chain; because the exponent sits
// directly above the mantissa, a mantissa overflow carries into the exponent
// and produces exactly the right result, including overflow to infinity.
//
// Infinities pass through unchanged. NaNs keep their top payload bits; if
// truncation would leave an empty mantissa (which would read as infinity),
// the quiet bit is set instead.
inline Bf16Word encode_bf16(float x) {
  std::uint32_t u = std::bit_cast<std::uint32_t>(x);
  if ((u & 0x7f800000u) == 0x7f800000u) {  // inf or NaN: never round
    auto hi = static_cast<std::uint16_t>(u >> 16);
    if ((u & 0x007fffffu) != 0u && (hi & 0x007fu) == 0u) {
      hi |= 0x0040u;
    }
    return Bf16Word{hi};
  }
  u += 0x7fffu + ((u >> 16) & 1u);
  return Bf16Word{static_cast<std::uint16_t>(u >> 16)};
}

// Convenience: binary32 -> nearest bf16 -> exact binary32.
inline float round_f32_to_bf16(float x) { return decode_bf16(encode_bf16(x)); }

}  // namespace ropelab
