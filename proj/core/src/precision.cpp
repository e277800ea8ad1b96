// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ropelab/precision.hpp"

namespace ropelab {

PrecisionPolicy PrecisionPolicy::exact() {
  return PrecisionPolicy{Real::f64, QkFormat::f64, Real::f64, Real::f64};
}

PrecisionPolicy PrecisionPolicy::f32_all() {
  return PrecisionPolicy{Real::f32, QkFormat::f32, Real::f32, Real::f32};
}

PrecisionPolicy PrecisionPolicy::fa2_bf16() {
  return PrecisionPolicy{Real::f32, QkFormat::bf16, Real::f32, Real::f32};
}

double round_real(double x, Real r) {
  switch (r) {
    case Real::f64:
      return x;
    case Real::f32:
      return static_cast<double>(static_cast<float>(x));
  }
  return x;  // unreachable
}

double round_qk(double x, QkFormat f) {
  switch (f) {
    case QkFormat::f64:
      return x;
    case QkFormat::f32:
      return static_cast<double>(static_cast<float>(x));
    case QkFormat::bf16:
      return static_cast<double>(round_f32_to_bf16(static_cast<float>(x)));
  }
  return x;  // unreachable
}

double round_along_policy(double x, Stage stage,
                          const PrecisionPolicy& policy) {
  switch (stage) {
    case Stage::rotation:
      return round_real(x, policy.rotation);
    case Stage::qk_storage:
      return round_qk(x, policy.qk_storage);
    case Stage::accumulation:
      return round_real(x, policy.accumulation);
    case Stage::softmax:
      return round_real(x, policy.softmax);
  }
  return x;  // unreachable
}

std::string to_string(const PrecisionPolicy& policy) {
  if (policy == PrecisionPolicy::exact()) return "exact";
  if (policy == PrecisionPolicy::f32_all()) return "f32";
  if (policy == PrecisionPolicy::fa2_bf16()) return "fa2-bf16";
  std::string s = "custom(";
  s += to_string(policy.rotation);
  s += ",";
  s += to_string(policy.qk_storage);
  s += ",";
  s += to_string(policy.accumulation);
  s += ",";
  s += to_string(policy.softmax);
  s += ")";
  return s;
}

std::optional<PrecisionPolicy> parse_policy(const std::string& name) {
  if (name == "exact") return PrecisionPolicy::exact();
  if (name == "f32") return PrecisionPolicy::f32_all();
  if (name == "fa2-bf16") return PrecisionPolicy::fa2_bf16();
  return std::nullopt;
}

const char* to_string(Real r) { return r == Real::f64 ? "f64" : "f32"; }

const char* to_string(QkFormat f) {
  switch (f) {
    case QkFormat::f64:
      return "f64";
    case QkFormat::f32:
      return "f32";
    case QkFormat::bf16:
      return "bf16";
  }
  return "?";
}

const char* to_string(Stage s) {
  switch (s) {
    case Stage::rotation:
      return "rotation";
    case Stage::qk_storage:
      return "qk_storage";
    case Stage::accumulation:
      return "accumulation";
    case Stage::softmax:
      return "softmax";
  }
  return "?";
}

}  // namespace ropelab
