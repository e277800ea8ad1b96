// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ropelab/attention.hpp"

namespace ropelab {

// Difference between the attention scores produced under two position shifts
// delta1 and delta2, for the same inputs and policy:
//
//   d = sum over (layer, head) and key columns j of
//         n_j * sum over rows i >= j of |S1(i,j) - S2(i,j)|,
//   n_j = 1 / (T - j),
//
// i.e. every key column's absolute-difference mass is normalized by how many
// rows can attend to it. In exact arithmetic d would be 0 for any pair of
// shifts; what remains is rounding introduced by the stage policy.
struct DiffReport {
  double d = 0.0;
  std::vector<double> per_token;  // length T: column j's weighted mass
  Matrix per_layer_head;          // layers x heads contributions
};

// Full-precision-pipeline score difference. Computes both forwards per
// (layer, head) slice, optionally in parallel over slices; results are
// combined in slice order, so the thread count never changes the bytes.
DiffReport score_diff_D(const AttentionStack& stack, const Matrix& inputs,
                        std::int64_t delta1, std::int64_t delta2,
                        const PrecisionPolicy& policy, int threads = 1);

// The per-key-column vector of score_diff_D.
std::vector<double> per_token_diff(const AttentionStack& stack,
                                   const Matrix& inputs, std::int64_t delta1,
                                   std::int64_t delta2,
                                   const PrecisionPolicy& policy,
                                   int threads = 1);

// Pre-softmax analog restricted to the first key column:
//   (1/T) * sum over (layer, head) and rows i of |A1(i,0) - A2(i,0)|.
// Uses the single-column forward, so it stays cheap at large T.
double logit_diff_first_token(const AttentionStack& stack,
                              const Matrix& inputs, std::int64_t delta1,
                              std::int64_t delta2,
                              const PrecisionPolicy& policy, int threads = 1);

// Shared experiment settings for the sweep drivers. Input sequences are
// standard normal, T x d_model, drawn per sequence index from seeds derived
// from `seed`; the stack itself is built by the caller.
struct SweepConfig {
  std::vector<std::int64_t> delta1_values;
  std::int64_t delta2 = 16;
  int T = 1024;
  int num_sequences = 10;
  std::uint64_t seed = 0;
  PrecisionPolicy policy;
  int threads = 1;
};

struct ShiftSweepRow {
  std::int64_t delta1 = 0;
  double mean_d = 0.0;
  std::vector<double> per_sequence;
};

struct ShiftSweepResult {
  SweepConfig config;
  std::vector<ShiftSweepRow> rows;
};

// For each delta1 value: mean over sequences of score_diff_D(delta1, delta2).
ShiftSweepResult shift_sweep(const AttentionStack& stack,
                             const SweepConfig& config);

struct PerTokenResult {
  SweepConfig config;                            // delta1_values holds one entry
  std::vector<double> mean_per_token;            // length T
  std::vector<std::vector<double>> per_sequence; // num_sequences x T
};

// Mean per-key-column difference vector over sequences, for one shift pair.
PerTokenResult per_token_sweep(const AttentionStack& stack,
                               const SweepConfig& config);

struct LengthSweepRow {
  int T = 0;
  double mean_d_logit = 0.0;
  std::vector<double> per_sequence;
};

struct LengthSweepResult {
  SweepConfig config;  // config.T unused; lengths below take its place
  std::vector<int> lengths;
  std::vector<LengthSweepRow> rows;
};

// For each length: mean over sequences of logit_diff_first_token.
LengthSweepResult length_sweep(const AttentionStack& stack,
                               const SweepConfig& config,
                               const std::vector<int>& lengths);

// CSV emission. One fixed header for every table:
//   delta1,delta2,T,policy,seed,metric,value
// with metric "D" (shift sweep), "per_token_<j>" (per-token vector), or
// "D_logit" (length sweep). Values print with enough digits to round-trip.
std::string to_csv(const ShiftSweepResult& result);
std::string to_csv(const PerTokenResult& result);
std::string to_csv(const LengthSweepResult& result);

// JSON mirrors carrying the same data plus per-sequence values.
std::string to_json(const ShiftSweepResult& result);
std::string to_json(const PerTokenResult& result);
std::string to_json(const LengthSweepResult& result);

}  // namespace ropelab
