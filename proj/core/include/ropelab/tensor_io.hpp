// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "ropelab/attention.hpp"

namespace ropelab {

// Weight container format, little-endian throughout:
//
//   bytes 0..7   magic "RPLTENS1"
//   bytes 8..11  u32 byte length of the JSON header
//   header       UTF-8 JSON: {"layers": L, "heads": H, "d_model": D,
//                             "dtype": "f32", "order": "row-major"}
//   payload      L * 2 * D * D binary32 values: per layer, all of W_Q
//                row-major, then all of W_K.
//
// Weights are stored as binary32, so saving rounds doubles to f32 once;
// saving a loaded stack again reproduces the file byte for byte.

void save_weights(const AttentionStack& stack, const std::string& path);

// Throws TensorLoadError: malformed_container when the file is not a
// container (magic, truncation, unparseable or incomplete header, wrong
// dtype/order), shape_mismatch when header dimensions are invalid or
// disagree with the payload size, non_finite when the payload holds a NaN or
// infinity. The rotary config is not stored; it is rebuilt from the given
// base and layout.
AttentionStack load_weights(const std::string& path,
                            double rotary_base = 10000.0,
                            RotaryLayout rotary_layout = RotaryLayout::chunked);

}  // namespace ropelab
