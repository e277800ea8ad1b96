// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ropelab/attention.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "ropelab/errors.hpp"
#include "ropelab/numeric.hpp"
#include "ropelab/rng.hpp"

namespace ropelab {

AttentionStack init_random(int layers, int heads, int d_model,
                           std::uint64_t seed, double rotary_base,
                           RotaryLayout rotary_layout) {
  if (layers < 1) {
    throw ConfigError("layers must be >= 1, got " + std::to_string(layers));
  }
  if (heads < 1) {
    throw ConfigError("heads must be >= 1, got " + std::to_string(heads));
  }
  if (d_model < 1 || d_model % heads != 0) {
    throw ConfigError("d_model (" + std::to_string(d_model) +
                      ") must be a positive multiple of heads (" +
                      std::to_string(heads) + ")");
  }
  AttentionStack stack;
  stack.heads = heads;
  stack.rotary = make_rotary_config(d_model / heads, rotary_base,
                                    rotary_layout);  // validates head_dim
  const double bound = 1.0 / std::sqrt(static_cast<double>(d_model));
  std::mt19937_64 g(seed);
  auto fill = [&](Matrix& m) {
    m = Matrix(d_model, d_model);
    for (double& v : m.data) v = rng::uniform_pm(g, bound);
  };
  stack.layers.resize(static_cast<std::size_t>(layers));
  for (LayerWeights& layer : stack.layers) {
    fill(layer.w_q);
    fill(layer.w_k);
  }
  return stack;
}

Matrix make_gaussian_inputs(int T, int d_model, std::uint64_t seed) {
  if (T < 1 || d_model < 1) {
    throw ConfigError("inputs need T >= 1 and d_model >= 1");
  }
  Matrix x(T, d_model);
  std::mt19937_64 g(seed);
  for (double& v : x.data) v = rng::gaussian(g);
  return x;
}

namespace {

void check_stack(const AttentionStack& stack) {
  if (stack.num_layers() < 1 || stack.heads < 1 || stack.head_dim() < 2) {
    throw ConfigError("attention stack is not initialized");
  }
  const int d = stack.d_model();
  for (const LayerWeights& layer : stack.layers) {
    if (layer.w_q.rows != d || layer.w_q.cols != d || layer.w_k.rows != d ||
        layer.w_k.cols != d) {
      throw ConfigError("weight matrices must be d_model x d_model");
    }
  }
}

void check_forward_args(const AttentionStack& stack, const Matrix& inputs,
                        PositionShift shift, const AttentionPlan* plan) {
  check_stack(stack);
  if (inputs.cols != stack.d_model()) {
    throw ConfigError("inputs have " + std::to_string(inputs.cols) +
                      " columns, stack d_model is " +
                      std::to_string(stack.d_model()));
  }
  if (inputs.rows < 1) {
    throw ConfigError("inputs must hold at least one token");
  }
  if (shift.delta < 0) {
    throw ConfigError("position shift must be non-negative");
  }
  if (plan != nullptr && plan->T != inputs.rows) {
    throw ConfigError("plan covers " + std::to_string(plan->T) +
                      " tokens, inputs hold " + std::to_string(inputs.rows));
  }
}

// Round one head's weight rows and all input rows to the rotation format.
template <typename T>
void cast_rows(const Matrix& m, int row0, int nrows, std::vector<T>& out) {
  out.resize(static_cast<std::size_t>(nrows) * m.cols);
  std::size_t idx = 0;
  for (int r = 0; r < nrows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      out[idx++] = static_cast<T>(m.at(row0 + r, c));
    }
  }
}

// q_out[t*dh + r] = fixed-tree dot of weight row r with input row t, formed
// and reduced in T. Results are widened to double (exact).
template <typename T>
void project_rows(const std::vector<T>& w, const std::vector<T>& x, int t0,
                  int t1, int dh, int d, std::vector<double>& out,
                  std::vector<T>& prod) {
  prod.resize(static_cast<std::size_t>(d));
  for (int t = t0; t < t1; ++t) {
    const T* xrow = &x[static_cast<std::size_t>(t) * d];
    for (int r = 0; r < dh; ++r) {
      const T* wrow = &w[static_cast<std::size_t>(r) * d];
      for (int c = 0; c < d; ++c) {
        prod[static_cast<std::size_t>(c)] = wrow[c] * xrow[c];
      }
      out[static_cast<std::size_t>(t) * dh + r] =
          static_cast<double>(pairwise_sum_in_place(std::span<T>(prod)));
    }
  }
}

// Project rows [t0, t1) of one head's q (or k), rotate them to their shifted
// positions, and round into the q/k storage format. Output values live in
// double but are representable in the storage format.
template <typename T>
void project_rotate_round(const AttentionStack& stack, const Matrix& weights,
                          int head, const Matrix& inputs, std::int64_t delta,
                          int t0, int t1, QkFormat fmt, Real precision,
                          std::vector<double>& out) {
  const int d = stack.d_model();
  const int dh = stack.head_dim();
  std::vector<T> w, x, prod;
  cast_rows(weights, head * dh, dh, w);
  cast_rows(inputs, 0, inputs.rows, x);
  out.assign(static_cast<std::size_t>(inputs.rows) * dh, 0.0);
  project_rows(w, x, t0, t1, dh, d, out, prod);
  for (int t = t0; t < t1; ++t) {
    std::span<double> row(&out[static_cast<std::size_t>(t) * dh],
                          static_cast<std::size_t>(dh));
    rotate_into(row, row, t + delta, stack.rotary, precision);
  }
  if (fmt != QkFormat::f64) {
    for (int t = t0; t < t1; ++t) {
      for (int r = 0; r < dh; ++r) {
        double& v = out[static_cast<std::size_t>(t) * dh + r];
        v = round_qk(v, fmt);
      }
    }
  }
}

// out(i, j) = fixed-tree dot of q row i and k row j in A, for the allowed
// (i, j) of the plan (or the full causal triangle).
template <typename A>
void fill_logits(const std::vector<double>& q, const std::vector<double>& k,
                 int T, int dh, const AttentionPlan* plan, Matrix& out) {
  std::vector<A> qa(q.size()), ka(k.size());
  for (std::size_t i = 0; i < q.size(); ++i) qa[i] = static_cast<A>(q[i]);
  for (std::size_t i = 0; i < k.size(); ++i) ka[i] = static_cast<A>(k[i]);
  std::vector<A> prod(static_cast<std::size_t>(dh));
  auto one = [&](int i, int j) {
    const A* qi = &qa[static_cast<std::size_t>(i) * dh];
    const A* kj = &ka[static_cast<std::size_t>(j) * dh];
    for (int c = 0; c < dh; ++c) {
      prod[static_cast<std::size_t>(c)] = qi[c] * kj[c];
    }
    out.at(i, j) =
        static_cast<double>(pairwise_sum_in_place(std::span<A>(prod)));
  };
  for (int i = 0; i < T; ++i) {
    if (plan != nullptr) {
      for (const Interval& iv : plan->rows[static_cast<std::size_t>(i)]) {
        assert(iv.hi <= i);
        for (int j = iv.lo; j <= iv.hi; ++j) one(i, j);
      }
    } else {
      for (int j = 0; j <= i; ++j) one(i, j);
    }
  }
}

template <typename S>
void softmax_rows(const Matrix& logits, const AttentionPlan* plan,
                  Matrix& out) {
  const int T = logits.rows;
  std::vector<S> exps, tree;
  for (int i = 0; i < T; ++i) {
    const Interval self{0, i};
    std::span<const Interval> ivs =
        plan != nullptr
            ? std::span<const Interval>(plan->rows[static_cast<std::size_t>(i)])
            : std::span<const Interval>(&self, 1);
    S m = -std::numeric_limits<S>::infinity();
    for (const Interval& iv : ivs) {
      for (int j = iv.lo; j <= iv.hi; ++j) {
        m = std::max(m, static_cast<S>(logits.at(i, j)));
      }
    }
    exps.clear();
    for (const Interval& iv : ivs) {
      for (int j = iv.lo; j <= iv.hi; ++j) {
        exps.push_back(std::exp(static_cast<S>(logits.at(i, j)) - m));
      }
    }
    tree.assign(exps.begin(), exps.end());
    const S z = pairwise_sum_in_place(std::span<S>(tree));
    std::size_t idx = 0;
    for (const Interval& iv : ivs) {
      for (int j = iv.lo; j <= iv.hi; ++j) {
        out.at(i, j) = static_cast<double>(exps[idx++] / z);
      }
    }
  }
}

}  // namespace

Matrix forward_head_logits(const AttentionStack& stack, int layer, int head,
                           const Matrix& inputs, PositionShift shift,
                           const PrecisionPolicy& policy,
                           const AttentionPlan* plan) {
  check_forward_args(stack, inputs, shift, plan);
  if (layer < 0 || layer >= stack.num_layers() || head < 0 ||
      head >= stack.heads) {
    throw ConfigError("layer/head index out of range");
  }
  const int T = inputs.rows;
  const int dh = stack.head_dim();
  std::vector<double> q, k;
  if (policy.rotation == Real::f64) {
    project_rotate_round<double>(stack, stack.layers[layer].w_q, head, inputs,
                                 shift.delta, 0, T, policy.qk_storage,
                                 policy.rotation, q);
    project_rotate_round<double>(stack, stack.layers[layer].w_k, head, inputs,
                                 shift.delta, 0, T, policy.qk_storage,
                                 policy.rotation, k);
  } else {
    project_rotate_round<float>(stack, stack.layers[layer].w_q, head, inputs,
                                shift.delta, 0, T, policy.qk_storage,
                                policy.rotation, q);
    project_rotate_round<float>(stack, stack.layers[layer].w_k, head, inputs,
                                shift.delta, 0, T, policy.qk_storage,
                                policy.rotation, k);
  }
  Matrix out(T, T);
  if (policy.accumulation == Real::f64) {
    fill_logits<double>(q, k, T, dh, plan, out);
  } else {
    fill_logits<float>(q, k, T, dh, plan, out);
  }
  return out;
}

HeadGrid forward_logits(const AttentionStack& stack, const Matrix& inputs,
                        PositionShift shift, const PrecisionPolicy& policy,
                        const AttentionPlan* plan) {
  check_forward_args(stack, inputs, shift, plan);
  HeadGrid grid;
  grid.layers = stack.num_layers();
  grid.heads = stack.heads;
  grid.mats.reserve(static_cast<std::size_t>(grid.layers) * grid.heads);
  for (int l = 0; l < grid.layers; ++l) {
    for (int h = 0; h < grid.heads; ++h) {
      grid.mats.push_back(
          forward_head_logits(stack, l, h, inputs, shift, policy, plan));
    }
  }
  return grid;
}

std::vector<double> forward_head_logit_column(const AttentionStack& stack,
                                              int layer, int head,
                                              const Matrix& inputs,
                                              PositionShift shift,
                                              const PrecisionPolicy& policy,
                                              int col) {
  check_forward_args(stack, inputs, shift, nullptr);
  if (layer < 0 || layer >= stack.num_layers() || head < 0 ||
      head >= stack.heads) {
    throw ConfigError("layer/head index out of range");
  }
  const int T = inputs.rows;
  if (col < 0 || col >= T) {
    throw ConfigError("column index out of range");
  }
  const int dh = stack.head_dim();
  std::vector<double> q, k;
  if (policy.rotation == Real::f64) {
    project_rotate_round<double>(stack, stack.layers[layer].w_q, head, inputs,
                                 shift.delta, col, T, policy.qk_storage,
                                 policy.rotation, q);
    project_rotate_round<double>(stack, stack.layers[layer].w_k, head, inputs,
                                 shift.delta, col, col + 1, policy.qk_storage,
                                 policy.rotation, k);
  } else {
    project_rotate_round<float>(stack, stack.layers[layer].w_q, head, inputs,
                                shift.delta, col, T, policy.qk_storage,
                                policy.rotation, q);
    project_rotate_round<float>(stack, stack.layers[layer].w_k, head, inputs,
                                shift.delta, col, col + 1, policy.qk_storage,
                                policy.rotation, k);
  }
  std::vector<double> out(static_cast<std::size_t>(T), 0.0);
  const std::span<const double> kcol(&k[static_cast<std::size_t>(col) * dh],
                                     static_cast<std::size_t>(dh));
  if (policy.accumulation == Real::f64) {
    std::vector<double> prod;
    for (int i = col; i < T; ++i) {
      const std::span<const double> qi(&q[static_cast<std::size_t>(i) * dh],
                                       static_cast<std::size_t>(dh));
      out[static_cast<std::size_t>(i)] = pairwise_dot<double>(qi, kcol, prod);
    }
  } else {
    std::vector<float> prod;
    for (int i = col; i < T; ++i) {
      const std::span<const double> qi(&q[static_cast<std::size_t>(i) * dh],
                                       static_cast<std::size_t>(dh));
      out[static_cast<std::size_t>(i)] =
          static_cast<double>(pairwise_dot<float>(qi, kcol, prod));
    }
  }
  return out;
}

Matrix softmax_scores(const Matrix& logits, Real precision,
                      const AttentionPlan* plan) {
  if (logits.rows != logits.cols || logits.rows < 1) {
    throw ConfigError("logit matrix must be square and non-empty");
  }
  if (plan != nullptr && plan->T != logits.rows) {
    throw ConfigError("plan size does not match logit matrix");
  }
  Matrix out(logits.rows, logits.cols);
  if (precision == Real::f64) {
    softmax_rows<double>(logits, plan, out);
  } else {
    softmax_rows<float>(logits, plan, out);
  }
  return out;
}

HeadGrid softmax_scores(const HeadGrid& logits, Real precision,
                        const AttentionPlan* plan) {
  HeadGrid out;
  out.layers = logits.layers;
  out.heads = logits.heads;
  out.mats.reserve(logits.mats.size());
  for (const Matrix& m : logits.mats) {
    out.mats.push_back(softmax_scores(m, precision, plan));
  }
  return out;
}

}  // namespace ropelab
