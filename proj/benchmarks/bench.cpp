// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "ropelab/attention.hpp"
#include "ropelab/bf16.hpp"
#include "ropelab/diagnostics.hpp"
#include "ropelab/mask.hpp"
#include "ropelab/numeric.hpp"
#include "ropelab/packing.hpp"
#include "ropelab/rng.hpp"

namespace {

using namespace ropelab;

void BM_Bf16RoundTrip(benchmark::State& state) {
  std::mt19937_64 g(1);
  std::vector<float> xs(4096);
  for (float& x : xs) x = static_cast<float>(rng::gaussian(g));
  for (auto _ : state) {
    for (float x : xs) {
      benchmark::DoNotOptimize(decode_bf16(encode_bf16(x)));
    }
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_Bf16RoundTrip);

void BM_PairwiseSum(benchmark::State& state) {
  std::mt19937_64 g(2);
  std::vector<double> base(static_cast<std::size_t>(state.range(0)));
  for (double& v : base) v = rng::gaussian(g);
  for (auto _ : state) {
    std::vector<double> v = base;
    benchmark::DoNotOptimize(pairwise_sum_in_place(std::span<double>(v)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PairwiseSum)->Arg(1024)->Arg(65536);

void BM_Rotate(benchmark::State& state) {
  const RotaryConfig cfg = make_rotary_config(128, 10000.0);
  std::mt19937_64 g(3);
  std::vector<double> v(128);
  for (double& x : v) x = rng::gaussian(g);
  const Real fmt = state.range(0) == 0 ? Real::f64 : Real::f32;
  std::int64_t pos = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rotate(v, pos++, cfg, fmt));
  }
}
BENCHMARK(BM_Rotate)->Arg(0)->Arg(1);

void BM_ForwardHeadLogits(benchmark::State& state) {
  const AttentionStack stack = init_random(1, 4, 256, 42);
  const int T = static_cast<int>(state.range(0));
  const Matrix x = make_gaussian_inputs(T, 256, 7);
  const PrecisionPolicy policy = state.range(1) == 0
                                     ? PrecisionPolicy::exact()
                                     : PrecisionPolicy::fa2_bf16();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        forward_head_logits(stack, 0, 0, x, PositionShift{0}, policy));
  }
  state.SetItemsProcessed(state.iterations() * T * (T + 1) / 2);
}
BENCHMARK(BM_ForwardHeadLogits)
    ->Args({128, 0})
    ->Args({128, 1})
    ->Args({512, 0})
    ->Args({512, 1});

void BM_SoftmaxScores(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  std::mt19937_64 g(4);
  Matrix logits(T, T);
  for (double& v : logits.data) v = rng::gaussian(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(softmax_scores(logits, Real::f32));
  }
  state.SetItemsProcessed(state.iterations() * T * (T + 1) / 2);
}
BENCHMARK(BM_SoftmaxScores)->Arg(256)->Arg(1024);

void BM_MaskCompile(benchmark::State& state) {
  std::vector<DocSpec> docs;
  for (int d = 0; d < 32; ++d) docs.push_back(DocSpec{d, 31, ""});
  const BatchLayout layout =
      layout_for_scheme(docs, MaskScheme::interleaved_anchor, 9, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compile(layout, MaskScheme::interleaved_anchor));
  }
  state.SetItemsProcessed(state.iterations() * layout.size());
}
BENCHMARK(BM_MaskCompile);

void BM_ScoreDiff(benchmark::State& state) {
  const AttentionStack stack = init_random(1, 2, 64, 5);
  const Matrix x = make_gaussian_inputs(128, 64, 6);
  const PrecisionPolicy policy = PrecisionPolicy::fa2_bf16();
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_diff_D(stack, x, 0, 16, policy).d);
  }
}
BENCHMARK(BM_ScoreDiff);

}  // namespace

BENCHMARK_MAIN();
