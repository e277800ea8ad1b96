// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "ropelab/mask.hpp"
#include "ropelab/matrix.hpp"
#include "ropelab/precision.hpp"
#include "ropelab/rope.hpp"

namespace ropelab {

// Query/key projections of one layer; d_model x d_model, row-major.
// There are no value/output projections: attention scores are the product
// being studied, so the stack stops at softmax.
struct LayerWeights {
  Matrix w_q;
  Matrix w_k;
};

// A multi-layer multi-head Q/K stack sharing one per-head rotary config.
// Layers are independent (no residual stream): each layer projects the same
// input sequence. Head h of a layer owns rows [h*head_dim, (h+1)*head_dim).
struct AttentionStack {
  std::vector<LayerWeights> layers;
  int heads = 0;
  RotaryConfig rotary;  // head_dim = d_model / heads

  int num_layers() const { return static_cast<int>(layers.size()); }
  int head_dim() const { return rotary.head_dim; }
  int d_model() const { return heads * rotary.head_dim; }
};

// Per-(layer, head) grid of matrices, row-major over (layer, head).
struct HeadGrid {
  int layers = 0;
  int heads = 0;
  std::vector<Matrix> mats;

  Matrix& at(int l, int h) { return mats[static_cast<std::size_t>(l) * heads + h]; }
  const Matrix& at(int l, int h) const {
    return mats[static_cast<std::size_t>(l) * heads + h];
  }
};

// Weights drawn i.i.d. uniform from [-1/sqrt(d_model), +1/sqrt(d_model)),
// filled in a fixed order (per layer: all of W_Q row-major, then all of W_K)
// from one deterministic engine, so equal seeds give bit-identical stacks.
AttentionStack init_random(int layers, int heads, int d_model,
                           std::uint64_t seed, double rotary_base = 10000.0,
                           RotaryLayout rotary_layout = RotaryLayout::chunked);

// T x d_model matrix of i.i.d. standard normal entries, filled row-major.
Matrix make_gaussian_inputs(int T, int d_model, std::uint64_t seed);

// Pre-softmax logit matrices A[i][j] = (R_{i+delta} q_i) . (R_{j+delta} k_j)
// for every (layer, head), computed under the stage policy:
//   1. projection and rotation in the rotation format,
//   2. rotated q/k rounded to the q/k storage format,
//   3. dot products accumulated in the accumulation format (fixed tree).
// Entries outside the plan (outside j <= i when plan is null) are 0 and are
// never computed. Throws ConfigError on shape mismatches.
HeadGrid forward_logits(const AttentionStack& stack, const Matrix& inputs,
                        PositionShift shift, const PrecisionPolicy& policy,
                        const AttentionPlan* plan = nullptr);

// Single (layer, head) slice of forward_logits; the exact same arithmetic.
Matrix forward_head_logits(const AttentionStack& stack, int layer, int head,
                           const Matrix& inputs, PositionShift shift,
                           const PrecisionPolicy& policy,
                           const AttentionPlan* plan = nullptr);

// Column `col` of the logit matrix for one (layer, head): entries i >= col.
// Entries i < col are 0. Cheaper than a full forward when only one key
// column is needed.
std::vector<double> forward_head_logit_column(const AttentionStack& stack,
                                              int layer, int head,
                                              const Matrix& inputs,
                                              PositionShift shift,
                                              const PrecisionPolicy& policy,
                                              int col);

// Row-wise softmax over the allowed columns of each row (the plan's
// intervals, or j <= i when plan is null), evaluated in `precision` with the
// usual max subtraction; the exponential sum uses the fixed reduction tree.
// Masked entries are exactly 0; allowed rows sum to 1 up to format rounding.
Matrix softmax_scores(const Matrix& logits, Real precision,
                      const AttentionPlan* plan = nullptr);

HeadGrid softmax_scores(const HeadGrid& logits, Real precision,
                        const AttentionPlan* plan = nullptr);

}  // namespace ropelab
