// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "ropelab/bf16.hpp"

namespace ropelab {

// Real formats the pipeline can compute in. Arithmetic stages are f64 or f32;
// bf16 is storage-only and so appears only in QkFormat.
enum class Real { f64, f32 };

// Storage format for rotated q/k vectors between rotation and the dot.
enum class QkFormat { f64, f32, bf16 };

// The four points of the attention pipeline where a number format choice
// takes effect.
enum class Stage { rotation, qk_storage, accumulation, softmax };

// Per-stage format assignment. Every value is held in double between stages;
// a stage narrower than f64 rounds values to its format before and during its
// arithmetic. bf16 products are still accumulated in the accumulation format
// (a bf16 x bf16 product is exact in f32: 8+8 significand bits fit in 24).
struct PrecisionPolicy {
  Real rotation = Real::f64;
  QkFormat qk_storage = QkFormat::f64;
  Real accumulation = Real::f64;
  Real softmax = Real::f64;

  friend bool operator==(const PrecisionPolicy&,
                         const PrecisionPolicy&) = default;

  // Everything in f64. Reference semantics.
  static PrecisionPolicy exact();
  // Everything in f32.
  static PrecisionPolicy f32_all();
  // Rotation in f32, rotated q/k stored as bf16, f32 accumulation and
  // softmax. Mirrors a fused attention kernel that keeps its operands in
  // bf16 but runs outer arithmetic in f32.
  static PrecisionPolicy fa2_bf16();
};

// Round a double to a real format. f64 is the identity.
double round_real(double x, Real r);

// Round a double to a q/k storage format. bf16 narrows through f32 first
// (double -> f32 -> bf16), matching how a kernel would down-convert an f32
// register; both steps round to nearest even.
double round_qk(double x, QkFormat f);

// Round `x` as the given pipeline stage would store it under `policy`.
double round_along_policy(double x, Stage stage, const PrecisionPolicy& policy);

// Canonical names: "exact", "f32", "fa2-bf16".
std::string to_string(const PrecisionPolicy& policy);
std::optional<PrecisionPolicy> parse_policy(const std::string& name);

const char* to_string(Real r);
const char* to_string(QkFormat f);
const char* to_string(Stage s);

}  // namespace ropelab
