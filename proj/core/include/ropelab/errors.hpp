// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ropelab {

// Invalid configuration: bad dimensions, unknown names, out-of-range values.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A token sequence that violates the layout rules (misplaced anchor,
// non-contiguous chunk, bad within-document numbering, ...).
struct LayoutError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Failure while reading a serialized weight container. The code separates
// "file is not a container" from "container disagrees with itself" from
// "payload holds non-finite values".
struct TensorLoadError : std::runtime_error {
  enum class Code { malformed_container, shape_mismatch, non_finite };

  TensorLoadError(Code c, const std::string& msg)
      : std::runtime_error(msg), code(c) {}

  Code code;
};

}  // namespace ropelab
