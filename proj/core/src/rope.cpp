// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ropelab/rope.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "ropelab/errors.hpp"
#include "ropelab/numeric.hpp"

namespace ropelab {

RotaryConfig make_rotary_config(int head_dim, double base,
                                RotaryLayout layout) {
  if (head_dim < 2 || head_dim % 2 != 0) {
    throw ConfigError("rotary head_dim must be even and >= 2, got " +
                      std::to_string(head_dim));
  }
  if (!std::isfinite(base) || base <= 0.0) {
    throw ConfigError("rotary base must be a finite positive value");
  }
  RotaryConfig cfg;
  cfg.head_dim = head_dim;
  cfg.base = base;
  cfg.layout = layout;
  cfg.freqs.resize(static_cast<std::size_t>(head_dim) / 2);
  for (std::size_t i = 0; i < cfg.freqs.size(); ++i) {
    cfg.freqs[i] =
        std::pow(base, -2.0 * static_cast<double>(i) / head_dim);
  }
  return cfg;
}

namespace {

void check_rotate_args(std::size_t n, std::int64_t pos,
                       const RotaryConfig& cfg) {
  if (static_cast<int>(n) != cfg.head_dim) {
    throw ConfigError("rotate: vector length " + std::to_string(n) +
                      " != head_dim " + std::to_string(cfg.head_dim));
  }
  if (cfg.freqs.size() != static_cast<std::size_t>(cfg.head_dim) / 2) {
    throw ConfigError("rotate: frequency table does not match head_dim");
  }
  if (std::llabs(pos) > kMaxRotaryPosition) {
    throw ConfigError("rotate: |position| exceeds 2^53; angles would lose "
                      "integer precision");
  }
}

template <typename T>
void rotate_impl(std::span<const double> in, std::span<double> out,
                 std::int64_t pos, const RotaryConfig& cfg) {
  const std::size_t half = cfg.freqs.size();
  const bool chunked = cfg.layout == RotaryLayout::chunked;
  const double posd = static_cast<double>(pos);
  for (std::size_t c = 0; c < half; ++c) {
    const std::size_t i0 = chunked ? 2 * c : c;
    const std::size_t i1 = chunked ? 2 * c + 1 : c + half;
    const T ang = static_cast<T>(posd * cfg.freqs[c]);
    const T cs = std::cos(ang);
    const T sn = std::sin(ang);
    const T a = static_cast<T>(in[i0]);
    const T b = static_cast<T>(in[i1]);
    out[i0] = static_cast<double>(static_cast<T>(a * cs - b * sn));
    out[i1] = static_cast<double>(static_cast<T>(a * sn + b * cs));
  }
}

}  // namespace

void rotate_into(std::span<const double> in, std::span<double> out,
                 std::int64_t pos, const RotaryConfig& config,
                 Real precision) {
  check_rotate_args(in.size(), pos, config);
  if (out.size() != in.size()) {
    throw ConfigError("rotate: output length does not match input");
  }
  if (pos == 0) {  // the zero rotation is the identity; skip the arithmetic
    for (std::size_t i = 0; i < in.size(); ++i) {
      out[i] = round_real(in[i], precision);
    }
    return;
  }
  if (precision == Real::f64) {
    rotate_impl<double>(in, out, pos, config);
  } else {
    rotate_impl<float>(in, out, pos, config);
  }
}

std::vector<double> rotate(std::span<const double> v, std::int64_t pos,
                           const RotaryConfig& config, Real precision) {
  std::vector<double> out(v.size());
  rotate_into(v, std::span<double>(out), pos, config, precision);
  return out;
}

double rope_logit(std::span<const double> q, std::span<const double> k,
                  std::int64_t i, std::int64_t j, PositionShift shift,
                  const RotaryConfig& config, const PrecisionPolicy& policy) {
  if (shift.delta < 0) {
    throw ConfigError("rope_logit: shift must be non-negative");
  }
  std::vector<double> qr = rotate(q, i + shift.delta, config, policy.rotation);
  std::vector<double> kr = rotate(k, j + shift.delta, config, policy.rotation);
  for (double& x : qr) x = round_qk(x, policy.qk_storage);
  for (double& x : kr) x = round_qk(x, policy.qk_storage);
  if (policy.accumulation == Real::f64) {
    std::vector<double> scratch;
    return pairwise_dot<double, double>(qr, kr, scratch);
  }
  std::vector<float> scratch;
  return static_cast<double>(pairwise_dot<float, double>(qr, kr, scratch));
}

const char* to_string(RotaryLayout layout) {
  return layout == RotaryLayout::chunked ? "chunked" : "half_split";
}

}  // namespace ropelab
