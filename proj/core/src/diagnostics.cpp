// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ropelab/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ropelab/errors.hpp"
#include "ropelab/numeric.hpp"
#include "ropelab/parallel.hpp"
#include "ropelab/rng.hpp"

namespace ropelab {

namespace {

void check_diff_args(std::int64_t delta1, std::int64_t delta2) {
  if (delta1 < 0 || delta2 < 0) {
    throw ConfigError("position shifts must be non-negative");
  }
}

void check_sweep_config(const SweepConfig& config) {
  if (config.delta1_values.empty()) {
    throw ConfigError("sweep needs at least one delta1 value");
  }
  for (std::int64_t d : config.delta1_values) {
    if (d < 0) throw ConfigError("position shifts must be non-negative");
  }
  if (config.delta2 < 0) {
    throw ConfigError("position shifts must be non-negative");
  }
  if (config.num_sequences < 1) {
    throw ConfigError("num_sequences must be >= 1");
  }
  if (config.threads < 1) {
    throw ConfigError("threads must be >= 1");
  }
}

std::uint64_t sequence_seed(std::uint64_t seed, int s) {
  return rng::derive_seed(seed, 1 + static_cast<std::uint64_t>(s));
}

}  // namespace

DiffReport score_diff_D(const AttentionStack& stack, const Matrix& inputs,
                        std::int64_t delta1, std::int64_t delta2,
                        const PrecisionPolicy& policy, int threads) {
  check_diff_args(delta1, delta2);
  const int T = inputs.rows;
  const int slices = stack.num_layers() * stack.heads;

  // Column j's difference mass is weighted by n_j = 1/(T - j), the inverse
  // of how many rows attend to that key column.
  std::vector<double> n(static_cast<std::size_t>(T));
  for (int j = 0; j < T; ++j) {
    n[static_cast<std::size_t>(j)] = 1.0 / static_cast<double>(T - j);
  }

  // One weighted column-mass vector per (layer, head) slice; slices may run
  // in parallel, reductions happen after the join in slice order.
  std::vector<std::vector<double>> slice_mass(
      static_cast<std::size_t>(slices));
  parallel_for(slices, threads, [&](int lh) {
    const int l = lh / stack.heads;
    const int h = lh % stack.heads;
    Matrix s1, s2;
    {
      Matrix a1 = forward_head_logits(stack, l, h, inputs,
                                      PositionShift{delta1}, policy);
      s1 = softmax_scores(a1, policy.softmax);
    }
    {
      Matrix a2 = forward_head_logits(stack, l, h, inputs,
                                      PositionShift{delta2}, policy);
      s2 = softmax_scores(a2, policy.softmax);
    }
    std::vector<double>& mass = slice_mass[static_cast<std::size_t>(lh)];
    mass.resize(static_cast<std::size_t>(T));
    std::vector<double> col;
    for (int j = 0; j < T; ++j) {
      col.clear();
      for (int i = j; i < T; ++i) {
        col.push_back(std::fabs(s1.at(i, j) - s2.at(i, j)));
      }
      mass[static_cast<std::size_t>(j)] =
          n[static_cast<std::size_t>(j)] *
          pairwise_sum_in_place(std::span<double>(col));
    }
  });

  DiffReport report;
  report.per_token.resize(static_cast<std::size_t>(T));
  report.per_layer_head = Matrix(stack.num_layers(), stack.heads);
  std::vector<double> tree;
  for (int j = 0; j < T; ++j) {
    tree.clear();
    for (int lh = 0; lh < slices; ++lh) {
      tree.push_back(slice_mass[static_cast<std::size_t>(lh)]
                               [static_cast<std::size_t>(j)]);
    }
    report.per_token[static_cast<std::size_t>(j)] =
        pairwise_sum_in_place(std::span<double>(tree));
  }
  for (int lh = 0; lh < slices; ++lh) {
    report.per_layer_head.data[static_cast<std::size_t>(lh)] =
        pairwise_sum(std::span<const double>(
                         slice_mass[static_cast<std::size_t>(lh)]),
                     tree);
  }
  report.d = pairwise_sum(std::span<const double>(report.per_token), tree);
  return report;
}

std::vector<double> per_token_diff(const AttentionStack& stack,
                                   const Matrix& inputs, std::int64_t delta1,
                                   std::int64_t delta2,
                                   const PrecisionPolicy& policy,
                                   int threads) {
  return score_diff_D(stack, inputs, delta1, delta2, policy, threads)
      .per_token;
}

double logit_diff_first_token(const AttentionStack& stack,
                              const Matrix& inputs, std::int64_t delta1,
                              std::int64_t delta2,
                              const PrecisionPolicy& policy, int threads) {
  check_diff_args(delta1, delta2);
  const int T = inputs.rows;
  const int slices = stack.num_layers() * stack.heads;
  std::vector<double> slice_mass(static_cast<std::size_t>(slices), 0.0);
  parallel_for(slices, threads, [&](int lh) {
    const int l = lh / stack.heads;
    const int h = lh % stack.heads;
    const std::vector<double> c1 = forward_head_logit_column(
        stack, l, h, inputs, PositionShift{delta1}, policy, 0);
    const std::vector<double> c2 = forward_head_logit_column(
        stack, l, h, inputs, PositionShift{delta2}, policy, 0);
    std::vector<double> diff(static_cast<std::size_t>(T));
    for (int i = 0; i < T; ++i) {
      diff[static_cast<std::size_t>(i)] =
          std::fabs(c1[static_cast<std::size_t>(i)] -
                    c2[static_cast<std::size_t>(i)]);
    }
    slice_mass[static_cast<std::size_t>(lh)] =
        pairwise_sum_in_place(std::span<double>(diff));
  });
  return pairwise_sum(std::span<const double>(slice_mass)) /
         static_cast<double>(T);
}

ShiftSweepResult shift_sweep(const AttentionStack& stack,
                             const SweepConfig& config) {
  check_sweep_config(config);
  ShiftSweepResult result;
  result.config = config;
  result.rows.resize(config.delta1_values.size());
  for (std::size_t di = 0; di < config.delta1_values.size(); ++di) {
    result.rows[di].delta1 = config.delta1_values[di];
    result.rows[di].per_sequence.resize(
        static_cast<std::size_t>(config.num_sequences));
  }
  // Parallel over sequences: each task draws its own inputs and fills one
  // slot per delta1; means are reduced after the join.
  parallel_for(config.num_sequences, config.threads, [&](int s) {
    const Matrix x = make_gaussian_inputs(config.T, stack.d_model(),
                                          sequence_seed(config.seed, s));
    for (std::size_t di = 0; di < config.delta1_values.size(); ++di) {
      result.rows[di].per_sequence[static_cast<std::size_t>(s)] =
          score_diff_D(stack, x, config.delta1_values[di], config.delta2,
                       config.policy, 1)
              .d;
    }
  });
  std::vector<double> tree;
  for (ShiftSweepRow& row : result.rows) {
    row.mean_d =
        pairwise_sum(std::span<const double>(row.per_sequence), tree) /
        static_cast<double>(config.num_sequences);
  }
  return result;
}

PerTokenResult per_token_sweep(const AttentionStack& stack,
                               const SweepConfig& config) {
  check_sweep_config(config);
  if (config.delta1_values.size() != 1) {
    throw ConfigError("per-token sweep takes exactly one delta1 value");
  }
  PerTokenResult result;
  result.config = config;
  result.per_sequence.resize(static_cast<std::size_t>(config.num_sequences));
  parallel_for(config.num_sequences, config.threads, [&](int s) {
    const Matrix x = make_gaussian_inputs(config.T, stack.d_model(),
                                          sequence_seed(config.seed, s));
    result.per_sequence[static_cast<std::size_t>(s)] =
        per_token_diff(stack, x, config.delta1_values[0], config.delta2,
                       config.policy, 1);
  });
  result.mean_per_token.resize(static_cast<std::size_t>(config.T));
  std::vector<double> tree;
  for (int j = 0; j < config.T; ++j) {
    tree.clear();
    for (int s = 0; s < config.num_sequences; ++s) {
      tree.push_back(result.per_sequence[static_cast<std::size_t>(s)]
                                        [static_cast<std::size_t>(j)]);
    }
    result.mean_per_token[static_cast<std::size_t>(j)] =
        pairwise_sum_in_place(std::span<double>(tree)) /
        static_cast<double>(config.num_sequences);
  }
  return result;
}

LengthSweepResult length_sweep(const AttentionStack& stack,
                               const SweepConfig& config,
                               const std::vector<int>& lengths) {
  check_sweep_config(config);
  if (config.delta1_values.size() != 1) {
    throw ConfigError("length sweep takes exactly one delta1 value");
  }
  if (lengths.empty()) {
    throw ConfigError("length sweep needs at least one length");
  }
  for (int t : lengths) {
    if (t < 1) throw ConfigError("sequence lengths must be >= 1");
  }
  LengthSweepResult result;
  result.config = config;
  result.lengths = lengths;
  result.rows.resize(lengths.size());
  for (std::size_t li = 0; li < lengths.size(); ++li) {
    LengthSweepRow& row = result.rows[li];
    row.T = lengths[li];
    row.per_sequence.resize(static_cast<std::size_t>(config.num_sequences));
    parallel_for(config.num_sequences, config.threads, [&](int s) {
      const Matrix x = make_gaussian_inputs(row.T, stack.d_model(),
                                            sequence_seed(config.seed, s));
      row.per_sequence[static_cast<std::size_t>(s)] = logit_diff_first_token(
          stack, x, config.delta1_values[0], config.delta2, config.policy, 1);
    });
    std::vector<double> tree;
    row.mean_d_logit =
        pairwise_sum(std::span<const double>(row.per_sequence), tree) /
        static_cast<double>(config.num_sequences);
  }
  return result;
}

namespace {

// Shortest text that losslessly round-trips a double.
std::string fmt_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void csv_row(std::ostringstream& out, std::int64_t delta1, std::int64_t delta2,
             int T, const std::string& policy, std::uint64_t seed,
             const std::string& metric, double value) {
  out << delta1 << ',' << delta2 << ',' << T << ',' << policy << ',' << seed
      << ',' << metric << ',' << fmt_value(value) << '\n';
}

constexpr const char* kCsvHeader = "delta1,delta2,T,policy,seed,metric,value\n";

}  // namespace

std::string to_csv(const ShiftSweepResult& result) {
  std::ostringstream out;
  out << kCsvHeader;
  const std::string policy = to_string(result.config.policy);
  for (const ShiftSweepRow& row : result.rows) {
    csv_row(out, row.delta1, result.config.delta2, result.config.T, policy,
            result.config.seed, "D", row.mean_d);
  }
  return out.str();
}

std::string to_csv(const PerTokenResult& result) {
  std::ostringstream out;
  out << kCsvHeader;
  const std::string policy = to_string(result.config.policy);
  for (std::size_t j = 0; j < result.mean_per_token.size(); ++j) {
    csv_row(out, result.config.delta1_values[0], result.config.delta2,
            result.config.T, policy, result.config.seed,
            "per_token_" + std::to_string(j), result.mean_per_token[j]);
  }
  return out.str();
}

std::string to_csv(const LengthSweepResult& result) {
  std::ostringstream out;
  out << kCsvHeader;
  const std::string policy = to_string(result.config.policy);
  for (const LengthSweepRow& row : result.rows) {
    csv_row(out, result.config.delta1_values[0], result.config.delta2, row.T,
            policy, result.config.seed, "D_logit", row.mean_d_logit);
  }
  return out.str();
}

std::string to_json(const ShiftSweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ShiftSweepRow& row : result.rows) {
    rows.push_back({{"delta1", row.delta1},
                    {"mean_D", row.mean_d},
                    {"per_sequence", row.per_sequence}});
  }
  const nlohmann::json j{
      {"kind", "shift_sweep"},
      {"delta2", result.config.delta2},
      {"T", result.config.T},
      {"policy", to_string(result.config.policy)},
      {"seed", result.config.seed},
      {"num_sequences", result.config.num_sequences},
      {"rows", rows},
  };
  return j.dump(2);
}

std::string to_json(const PerTokenResult& result) {
  const nlohmann::json j{
      {"kind", "per_token"},
      {"delta1", result.config.delta1_values[0]},
      {"delta2", result.config.delta2},
      {"T", result.config.T},
      {"policy", to_string(result.config.policy)},
      {"seed", result.config.seed},
      {"num_sequences", result.config.num_sequences},
      {"mean_per_token", result.mean_per_token},
      {"per_sequence", result.per_sequence},
  };
  return j.dump(2);
}

std::string to_json(const LengthSweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const LengthSweepRow& row : result.rows) {
    rows.push_back({{"T", row.T},
                    {"mean_D_logit", row.mean_d_logit},
                    {"per_sequence", row.per_sequence}});
  }
  const nlohmann::json j{
      {"kind", "length_sweep"},
      {"delta1", result.config.delta1_values[0]},
      {"delta2", result.config.delta2},
      {"policy", to_string(result.config.policy)},
      {"seed", result.config.seed},
      {"num_sequences", result.config.num_sequences},
      {"rows", rows},
  };
  return j.dump(2);
}

}  // namespace ropelab
