// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ropelab/precision.hpp"

using namespace ropelab;

TEST_CASE("preset stage assignments") {
  const PrecisionPolicy exact = PrecisionPolicy::exact();
  CHECK(exact.rotation == Real::f64);
  CHECK(exact.qk_storage == QkFormat::f64);
  CHECK(exact.accumulation == Real::f64);
  CHECK(exact.softmax == Real::f64);

  const PrecisionPolicy f32 = PrecisionPolicy::f32_all();
  CHECK(f32.rotation == Real::f32);
  CHECK(f32.qk_storage == QkFormat::f32);
  CHECK(f32.accumulation == Real::f32);
  CHECK(f32.softmax == Real::f32);

  const PrecisionPolicy fa2 = PrecisionPolicy::fa2_bf16();
  CHECK(fa2.rotation == Real::f32);
  CHECK(fa2.qk_storage == QkFormat::bf16);
  CHECK(fa2.accumulation == Real::f32);
  CHECK(fa2.softmax == Real::f32);
}

TEST_CASE("round_real") {
  const double pi = 3.14159265358979323846;
  CHECK(round_real(pi, Real::f64) == pi);
  CHECK(round_real(pi, Real::f32) == static_cast<double>(3.14159274101257324f));
  CHECK(round_real(0.0, Real::f32) == 0.0);
}

TEST_CASE("round_qk narrows bf16 through f32 first") {
  // x = (1 + 2^-8) + 2^-30. Rounding straight to bf16 would go up (x is
  // above the midpoint 1 + 2^-8), but the contract narrows via f32: the f32
  // step lands exactly on the midpoint, and the bf16 tie then breaks to the
  // even mantissa, 1.0.
  const double x = 1.00390625 + std::ldexp(1.0, -30);
  CHECK(round_qk(x, QkFormat::bf16) == 1.0);
  CHECK(round_qk(x, QkFormat::f32) == 1.00390625);
  CHECK(round_qk(x, QkFormat::f64) == x);
}

TEST_CASE("round_along_policy dispatches on the stage") {
  const PrecisionPolicy fa2 = PrecisionPolicy::fa2_bf16();
  const double x = 1.0 + std::ldexp(1.0, -10);
  CHECK(round_along_policy(x, Stage::rotation, fa2) ==
        static_cast<double>(static_cast<float>(x)));
  CHECK(round_along_policy(x, Stage::qk_storage, fa2) == 1.0);  // bf16
  CHECK(round_along_policy(x, Stage::accumulation, fa2) ==
        static_cast<double>(static_cast<float>(x)));
  CHECK(round_along_policy(x, Stage::softmax, fa2) ==
        static_cast<double>(static_cast<float>(x)));
  const PrecisionPolicy exact = PrecisionPolicy::exact();
  for (Stage s : {Stage::rotation, Stage::qk_storage, Stage::accumulation,
                  Stage::softmax}) {
    CHECK(round_along_policy(x, s, exact) == x);
  }
}

TEST_CASE("policy names round-trip") {
  CHECK(to_string(PrecisionPolicy::exact()) == "exact");
  CHECK(to_string(PrecisionPolicy::f32_all()) == "f32");
  CHECK(to_string(PrecisionPolicy::fa2_bf16()) == "fa2-bf16");
  for (const char* name : {"exact", "f32", "fa2-bf16"}) {
    auto p = parse_policy(name);
    REQUIRE(p.has_value());
    CHECK(to_string(*p) == name);
  }
  CHECK(!parse_policy("bf16").has_value());
  CHECK(!parse_policy("").has_value());
  CHECK(!parse_policy("EXACT").has_value());
  // A hand-built mix is printable but has no canonical short name.
  PrecisionPolicy mixed = PrecisionPolicy::exact();
  mixed.qk_storage = QkFormat::bf16;
  CHECK(to_string(mixed) == "custom(f64,bf16,f64,f64)");
}
