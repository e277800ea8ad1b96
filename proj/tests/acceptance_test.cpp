// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks: one line per criterion, nonzero exit if any fails.
// Tolerances and size limits are pinned here on purpose — they are part of
// the contract, not tuning knobs.

#include <sys/wait.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ropelab/attention.hpp"
#include "ropelab/bf16.hpp"
#include "ropelab/diagnostics.hpp"
#include "ropelab/mask.hpp"
#include "ropelab/packing.hpp"
#include "ropelab/rng.hpp"
#include "ropelab/rope.hpp"
#include "support/oracles.hpp"

#ifndef ROPELAB_CLI_PATH
#error "ROPELAB_CLI_PATH must point at the ropelab binary"
#endif

using namespace ropelab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* format, ...) {
  va_list ap;
  va_start(ap, format);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), format, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. BF16 codec: exhaustive round-trip + 10^6 random values against the
//    independent ties-to-even reference. Budget: 5 s.

Outcome check_bf16_codec() {
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint32_t w = 0; w < 0x10000u; ++w) {
    const Bf16Word word{static_cast<std::uint16_t>(w)};
    if (encode_bf16(decode_bf16(word)).bits != word.bits) {
      return {false, fmt("round-trip breaks at bit pattern 0x%04x", w)};
    }
  }
  std::mt19937_64 g(0xacceb16u);
  for (int i = 0; i < 1'000'000; ++i) {
    const auto u = static_cast<std::uint32_t>(g());
    const float x = std::bit_cast<float>(u);
    if (encode_bf16(x).bits != oracle::bf16_bits(x)) {
      return {false, fmt("rounding disagrees with the reference at 0x%08x", u)};
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 5.0) return {false, fmt("took %.1f s, budget 5 s", dt)};
  return {true, fmt("65536 round-trips + 1e6 reference matches in %.2f s", dt)};
}

// ---------------------------------------------------------------------------
// 2. Relative-position property in f64: d = 128, 1000 random (q, k, i, j,
//    shift) with all positions <= 2^15; |logit(shifted) - logit(base)| must
//    stay below 1e-8 * |q| * |k|. Budget: 10 s.

Outcome check_relative_property() {
  const auto t0 = std::chrono::steady_clock::now();
  const RotaryConfig cfg = make_rotary_config(128, 10000.0);
  const PrecisionPolicy exact = PrecisionPolicy::exact();
  std::mt19937_64 g(2);
  double worst = 0.0;
  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<double> q(128), k(128);
    double nq = 0.0, nk = 0.0;
    for (double& v : q) {
      v = rng::gaussian(g);
      nq += v * v;
    }
    for (double& v : k) {
      v = rng::gaussian(g);
      nk += v * v;
    }
    const double scale = std::sqrt(nq) * std::sqrt(nk);
    const auto i = static_cast<std::int64_t>(rng::below(g, 1 << 15));
    const auto j = static_cast<std::int64_t>(rng::below(g, 1 << 15));
    const std::int64_t room = (1 << 15) - std::max(i, j);
    const auto delta = static_cast<std::int64_t>(
        rng::below(g, static_cast<std::uint64_t>(room)));
    const double base = rope_logit(q, k, i, j, PositionShift{0}, cfg, exact);
    const double shifted =
        rope_logit(q, k, i, j, PositionShift{delta}, cfg, exact);
    const double rel = std::fabs(shifted - base) / scale;
    worst = std::max(worst, rel);
    if (rel > 1e-8) {
      return {false, fmt("case %d: |diff| = %.3e * |q||k| at i=%lld j=%lld "
                         "delta=%lld",
                         iter, rel, static_cast<long long>(i),
                         static_cast<long long>(j),
                         static_cast<long long>(delta))};
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 10.0) return {false, fmt("took %.1f s, budget 10 s", dt)};
  return {true, fmt("1000 cases, worst |diff| = %.2e * |q||k| in %.2f s",
                    worst, dt)};
}

// ---------------------------------------------------------------------------
// 3. Precision-gap separation on the reference stack: L=2, H=4, d_model=256,
//    T=1024, 10 seeded sequences, shifts (0, 16). Budget: 5 min.

Outcome check_precision_gap() {
  const auto t0 = std::chrono::steady_clock::now();
  const int T = 1024;
  const AttentionStack stack = init_random(2, 4, 256, rng::derive_seed(0, 0));
  double ratio_sum = 0.0;
  double worst_exact = 0.0;
  for (int s = 0; s < 10; ++s) {
    const Matrix x =
        make_gaussian_inputs(T, 256, rng::derive_seed(0, 1 + s));
    const double d_exact =
        score_diff_D(stack, x, 0, 16, PrecisionPolicy::exact()).d;
    const double d_f32 =
        score_diff_D(stack, x, 0, 16, PrecisionPolicy::f32_all()).d;
    const double d_bf16 =
        score_diff_D(stack, x, 0, 16, PrecisionPolicy::fa2_bf16()).d;
    worst_exact = std::max(worst_exact, d_exact);
    if (d_exact > 1e-6) {
      return {false, fmt("sequence %d: D_exact = %.3e > 1e-6", s, d_exact)};
    }
    if (!(d_f32 > 0.0)) {
      return {false, fmt("sequence %d: D_f32 = %.3e is not > 0", s, d_f32)};
    }
    if (!(d_bf16 > d_f32)) {
      return {false, fmt("sequence %d: D_bf16 = %.3e <= D_f32 = %.3e", s,
                         d_bf16, d_f32)};
    }
    ratio_sum += d_bf16 / d_f32;
  }
  const double dt = seconds_since(t0);
  if (dt >= 300.0) return {false, fmt("took %.0f s, budget 300 s", dt)};
  return {true,
          fmt("10 sequences: D_exact <= %.1e, D_bf16/D_f32 mean ratio %.0f, "
              "%.0f s",
              worst_exact, ratio_sum / 10.0, dt)};
}

// ---------------------------------------------------------------------------
// 4. Zero-shift identities: equal shifts give exactly zero score and logit
//    differences under every policy, 100 random cases.

Outcome check_zero_shift() {
  std::mt19937_64 g(4);
  const PrecisionPolicy policies[] = {PrecisionPolicy::exact(),
                                      PrecisionPolicy::f32_all(),
                                      PrecisionPolicy::fa2_bf16()};
  for (int iter = 0; iter < 100; ++iter) {
    const int heads = 1 + static_cast<int>(rng::below(g, 2));
    const int head_dim = 2 * (1 + static_cast<int>(rng::below(g, 3)));
    const int layers = 1 + static_cast<int>(rng::below(g, 2));
    const AttentionStack stack =
        init_random(layers, heads, heads * head_dim, g());
    const int T = 2 + static_cast<int>(rng::below(g, 9));
    const Matrix x = make_gaussian_inputs(T, stack.d_model(), g());
    const auto delta = static_cast<std::int64_t>(rng::below(g, 64));
    for (const PrecisionPolicy& policy : policies) {
      const DiffReport report = score_diff_D(stack, x, delta, delta, policy);
      if (report.d != 0.0) {
        return {false, fmt("case %d: D(delta=%lld) = %.3e != 0", iter,
                           static_cast<long long>(delta), report.d)};
      }
      const double dl = logit_diff_first_token(stack, x, delta, delta, policy);
      if (dl != 0.0) {
        return {false, fmt("case %d: D_logit(delta=%lld) = %.3e != 0", iter,
                           static_cast<long long>(delta), dl)};
      }
    }
  }
  return {true, "100 cases x 3 policies: D and D_logit exactly 0"};
}

// ---------------------------------------------------------------------------
// 5. Mask oracle equivalence: 500 random layouts (T <= 64) x all schemes;
//    compiled plans must expand to exactly the predicate pair set.
//    Budget: 30 s.

bool pair_visible(const BatchLayout& layout, MaskScheme scheme, int i, int j) {
  if (j > i) return false;
  if (scheme == MaskScheme::full_causal) return true;
  const Token& ti = layout.tokens[static_cast<std::size_t>(i)];
  const Token& tj = layout.tokens[static_cast<std::size_t>(j)];
  if (scheme_needs_anchor(scheme) && ti.role != TokenRole::anchor && j == 0) {
    return true;
  }
  return ti.doc_id == tj.doc_id;
}

Outcome check_mask_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 g(5);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<DocSpec> docs;
    int total = 0;
    const int n_docs = 1 + static_cast<int>(rng::below(g, 6));
    for (int d = 0; d < n_docs; ++d) {
      const int len = 1 + static_cast<int>(rng::below(g, 9));
      if (total + len + n_docs + 1 > 64) break;  // keep T <= 64 with overhead
      docs.push_back(DocSpec{d, len, ""});
      total += len;
    }
    if (docs.empty()) docs.push_back(DocSpec{0, 1, ""});
    const int max_chunks = 1 + static_cast<int>(rng::below(g, 4));
    for (MaskScheme scheme : all_schemes()) {
      const BatchLayout layout =
          layout_for_scheme(docs, scheme, g(), max_chunks);
      if (layout.size() > 64) {
        return {false, fmt("generator bug: T = %d > 64", layout.size())};
      }
      const AttentionPlan plan = compile(layout, scheme);
      std::set<std::pair<int, int>> want;
      for (int i = 0; i < plan.T; ++i)
        for (int j = 0; j <= i; ++j)
          if (pair_visible(layout, scheme, i, j)) want.insert({i, j});
      const auto pairs = enumerate_pairs(plan);
      const std::set<std::pair<int, int>> got(pairs.begin(), pairs.end());
      if (got != want || pairs.size() != want.size() ||
          plan.pair_count != static_cast<std::int64_t>(want.size())) {
        return {false, fmt("iter %d: scheme %s expands to %zu pairs, "
                           "predicate says %zu",
                           iter, to_string(scheme), got.size(), want.size())};
      }
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 30.0) return {false, fmt("took %.1f s, budget 30 s", dt)};
  return {true, fmt("500 layouts x 7 schemes expand exactly in %.1f s", dt)};
}

// ---------------------------------------------------------------------------
// 6. Anchor closed form and pair cost. Three parts: the closed form on 200
//    random anchored layouts; the pinned 4-equal-docs ratio; and the claim
//    that a longest document <= T/2 forces a pair ratio under one half.

Outcome check_anchor_cost() {
  std::mt19937_64 g(6);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<DocSpec> docs;
    const int n_docs = 1 + static_cast<int>(rng::below(g, 8));
    for (int d = 0; d < n_docs; ++d) {
      docs.push_back(DocSpec{d, 1 + static_cast<int>(rng::below(g, 12)), ""});
    }
    const BatchLayout layout = contiguous_layout(docs, true, false);
    const AttentionPlan plan = compile(layout, MaskScheme::anchor);
    std::int64_t expect = 1 + (layout.size() - 1);
    for (const DocSpec& d : docs) {
      expect += static_cast<std::int64_t>(d.len) * (d.len + 1) / 2;
    }
    if (plan.pair_count != expect) {
      return {false, fmt("iter %d: closed form %lld, compiler %lld", iter,
                         static_cast<long long>(expect),
                         static_cast<long long>(plan.pair_count))};
    }
  }

  const std::vector<DocSpec> four = {{0, 4, ""}, {1, 4, ""}, {2, 4, ""},
                                     {3, 4, ""}};
  const BatchLayout four_layout = contiguous_layout(four, true, false);
  const AttentionPlan four_plan = compile(four_layout, MaskScheme::anchor);
  if (four_plan.T != 17 || four_plan.pair_count != 57 ||
      full_causal_pair_count(17) != 153) {
    return {false, fmt("4x4 case: T=%d pairs=%lld (want 17, 57/153)",
                       four_plan.T,
                       static_cast<long long>(four_plan.pair_count))};
  }
  if (pair_cost_ratio(four_layout, MaskScheme::anchor) != 57.0 / 153.0) {
    return {false, "4x4 case: ratio is not exactly 57/153"};
  }

  // Claimed bound: longest document <= T/2 implies pair ratio < 0.5. Checked
  // over random anchored layouts spanning 1..10 documents.
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<DocSpec> docs;
    const int n_docs = 1 + static_cast<int>(rng::below(g, 10));
    int longest = 0;
    for (int d = 0; d < n_docs; ++d) {
      const int len = 1 + static_cast<int>(rng::below(g, 16));
      docs.push_back(DocSpec{d, len, ""});
      longest = std::max(longest, len);
    }
    const BatchLayout layout = contiguous_layout(docs, true, false);
    if (2 * longest > layout.size()) continue;  // premise not met
    const double ratio = pair_cost_ratio(layout, MaskScheme::anchor);
    if (!(ratio < 0.5)) {
      std::string lens;
      for (const DocSpec& d : docs) {
        if (!lens.empty()) lens += ",";
        lens += std::to_string(d.len);
      }
      return {false,
              fmt("counterexample: docs [%s], T=%d, longest=%d <= T/2, "
                  "ratio = %.4f >= 0.5",
                  lens.c_str(), layout.size(), longest, ratio)};
    }
  }
  return {true, "closed form on 200 layouts, 57/153 pinned, ratio bound held"};
}

// ---------------------------------------------------------------------------
// 7. Packing and interleaving invariants across 1000 seeds.

Outcome check_packing_invariants() {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    std::mt19937_64 g(rng::derive_seed(7, seed));
    std::vector<DocSpec> docs;
    std::vector<int> lens;
    int total = 0;
    const int n_docs = 1 + static_cast<int>(rng::below(g, 6));
    for (int d = 0; d < n_docs; ++d) {
      const int len = 1 + static_cast<int>(rng::below(g, 15));
      docs.push_back(DocSpec{d, len, ""});
      lens.push_back(len);
      total += len;
    }

    const int max_chunks = 1 + static_cast<int>(rng::below(g, 5));
    const BatchLayout inter = interleave_chunks(docs, ChunkPolicy{max_chunks},
                                                seed);
    if (auto why = layout_violation(inter)) {
      return {false, fmt("seed %llu: interleave violates layout rules: %s",
                         static_cast<unsigned long long>(seed), why->c_str())};
    }
    if (inter.size() != total || doc_token_counts(inter) != lens) {
      return {false, fmt("seed %llu: interleave lost tokens",
                         static_cast<unsigned long long>(seed))};
    }
    // Within-document order: within_doc_index increases by 1 per document in
    // sequence order (0, 1, 2, ...).
    std::vector<int> next(static_cast<std::size_t>(n_docs), 0);
    for (const Token& t : inter.tokens) {
      if (t.within_doc_index != next[static_cast<std::size_t>(t.doc_id)]++) {
        return {false, fmt("seed %llu: within-document order broken",
                           static_cast<unsigned long long>(seed))};
      }
    }

    const MaskScheme schemes[] = {MaskScheme::full_causal, MaskScheme::anchor,
                                  MaskScheme::anchor_tag};
    const MaskScheme scheme = schemes[rng::below(g, 3)];
    const bool anchored = scheme_needs_anchor(scheme);
    const bool tagged = scheme_needs_tags(scheme);
    const int window = (anchored ? 1 : 0) + (tagged ? 1 : 0) + 1 +
                       static_cast<int>(rng::below(g, 14));
    const auto windows = pack_documents(lens, PackPolicy{window, scheme});
    int doc_tokens = 0, anchors = 0, tags = 0, all_tokens = 0;
    for (const BatchLayout& w : windows) {
      if (auto why = layout_violation(w)) {
        return {false, fmt("seed %llu: packed window violates layout rules: %s",
                           static_cast<unsigned long long>(seed),
                           why->c_str())};
      }
      all_tokens += w.size();
      for (const Token& t : w.tokens) {
        if (t.role == TokenRole::doc) doc_tokens++;
        if (t.role == TokenRole::anchor) anchors++;
        if (t.role == TokenRole::tag) tags++;
      }
    }
    if (doc_tokens != total) {
      return {false, fmt("seed %llu: pack conserved %d of %d doc tokens",
                         static_cast<unsigned long long>(seed), doc_tokens,
                         total)};
    }
    if (anchors != (anchored ? static_cast<int>(windows.size()) : 0)) {
      return {false, fmt("seed %llu: %d anchors across %zu windows",
                         static_cast<unsigned long long>(seed), anchors,
                         windows.size())};
    }
    if (!tagged && tags != 0) {
      return {false, fmt("seed %llu: unexpected tags",
                         static_cast<unsigned long long>(seed))};
    }
    if (all_tokens != total + anchors + tags) {
      return {false, fmt("seed %llu: token count %d != docs %d + overhead %d",
                         static_cast<unsigned long long>(seed), all_tokens,
                         total, anchors + tags)};
    }
  }
  return {true, "1000 seeds: interleave + pack invariants hold"};
}

// ---------------------------------------------------------------------------
// 8. Softmax contract: allowed rows sum to 1 within 1e-6 (f32) / 1e-12 (f64);
//    masked entries exactly 0. 200 random cases per scheme.

Outcome check_softmax_contract() {
  std::mt19937_64 g(8);
  for (MaskScheme scheme : all_schemes()) {
    for (int iter = 0; iter < 200; ++iter) {
      std::vector<DocSpec> docs;
      const int n_docs = 1 + static_cast<int>(rng::below(g, 4));
      for (int d = 0; d < n_docs; ++d) {
        docs.push_back(DocSpec{d, 1 + static_cast<int>(rng::below(g, 6)), ""});
      }
      const BatchLayout layout = layout_for_scheme(docs, scheme, g(), 3);
      const AttentionPlan plan = compile(layout, scheme);
      Matrix logits(plan.T, plan.T);
      for (double& v : logits.data) v = 3.0 * rng::gaussian(g);
      for (Real fmt_r : {Real::f32, Real::f64}) {
        const Matrix scores = softmax_scores(logits, fmt_r, &plan);
        const double tol = fmt_r == Real::f64 ? 1e-12 : 1e-6;
        for (int i = 0; i < plan.T; ++i) {
          double sum = 0.0;
          for (int j = 0; j < plan.T; ++j) {
            const double v = scores.at(i, j);
            if (!plan.allows(i, j) && v != 0.0) {
              return {false, fmt("scheme %s iter %d: masked (%d, %d) = %.3e",
                                 to_string(scheme), iter, i, j, v)};
            }
            sum += v;
          }
          if (std::fabs(sum - 1.0) > tol) {
            return {false,
                    fmt("scheme %s iter %d row %d: sum %.17g off by > %.0e",
                        to_string(scheme), iter, i, sum, tol)};
          }
        }
      }
    }
  }
  return {true, "7 schemes x 200 cases x {f32, f64}: sums and zeros hold"};
}

// ---------------------------------------------------------------------------
// 9. CLI determinism: identical flags and differing thread counts produce
//    byte-identical CSV.

std::string run_cli_capture(const std::string& args, int* code) {
  const std::string cmd =
      std::string(ROPELAB_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    *code = -1;
    return "";
  }
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  *code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

Outcome check_cli_determinism() {
  const std::string base =
      "shift-sweep --layers 1 --heads 2 --d-model 32 -T 48 "
      "--num-sequences 2 --delta1-list 0,8 --delta2 16 --seed 11";
  int c1 = 0, c2 = 0, c8 = 0;
  const std::string a = run_cli_capture(base + " --threads 1", &c1);
  const std::string b = run_cli_capture(base + " --threads 1", &c2);
  const std::string c = run_cli_capture(base + " --threads 8", &c8);
  if (c1 != 0 || c2 != 0 || c8 != 0) {
    return {false, fmt("CLI exits: %d, %d, %d", c1, c2, c8)};
  }
  if (a.empty() || a != b) {
    return {false, "two identical runs differ byte-for-byte"};
  }
  if (a != c) {
    return {false, "--threads 1 and --threads 8 differ byte-for-byte"};
  }
  return {true, fmt("%zu identical bytes across reruns and thread counts",
                    a.size())};
}

// ---------------------------------------------------------------------------
// 10. Scalar-oracle equivalence: small forwards match the straight-line
//     reimplementation bit for bit under every policy, 100 random cases.

oracle::Mat nested(const Matrix& m) {
  oracle::Mat out(static_cast<std::size_t>(m.rows),
                  std::vector<double>(static_cast<std::size_t>(m.cols)));
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c)
      out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
          m.at(r, c);
  return out;
}

Outcome check_scalar_oracle() {
  std::mt19937_64 g(10);
  const PrecisionPolicy policies[] = {
      PrecisionPolicy::exact(), PrecisionPolicy::f32_all(),
      PrecisionPolicy::fa2_bf16(),
      PrecisionPolicy{Real::f64, QkFormat::bf16, Real::f64, Real::f64}};
  const char pol_qk[] = {'d', 'f', 'b', 'b'};
  const char pol_rot[] = {'d', 'f', 'f', 'd'};
  const char pol_acc[] = {'d', 'f', 'f', 'd'};
  for (int iter = 0; iter < 100; ++iter) {
    const int heads = 1 + static_cast<int>(rng::below(g, 2));
    const int head_dim = 2 * (1 + static_cast<int>(rng::below(g, 2)));
    const int d_model = heads * head_dim;
    if (d_model > 8) continue;
    const int layers = 1 + static_cast<int>(rng::below(g, 2));
    const RotaryLayout layout = rng::below(g, 2) == 0
                                    ? RotaryLayout::chunked
                                    : RotaryLayout::half_split;
    const AttentionStack stack =
        init_random(layers, heads, d_model, g(), 10000.0, layout);
    const int T = 1 + static_cast<int>(rng::below(g, 8));  // 1..8
    const Matrix x = make_gaussian_inputs(T, d_model, g());
    const auto delta = static_cast<std::int64_t>(rng::below(g, 9));
    const oracle::Mat xs = nested(x);
    const bool chunked = layout == RotaryLayout::chunked;
    for (std::size_t p = 0; p < 4; ++p) {
      const HeadGrid grid =
          forward_logits(stack, x, PositionShift{delta}, policies[p]);
      for (int l = 0; l < layers; ++l) {
        for (int h = 0; h < heads; ++h) {
          const oracle::ScalarPolicy sp{pol_rot[p], pol_qk[p], pol_acc[p],
                                        'd'};
          const oracle::Mat want = oracle::head_logits(
              nested(stack.layers[static_cast<std::size_t>(l)].w_q),
              nested(stack.layers[static_cast<std::size_t>(l)].w_k), h,
              head_dim, xs, delta, stack.rotary.freqs, chunked, sp);
          const Matrix& got = grid.at(l, h);
          for (int i = 0; i < T; ++i) {
            for (int j = 0; j <= i; ++j) {
              if (got.at(i, j) !=
                  want[static_cast<std::size_t>(i)]
                      [static_cast<std::size_t>(j)]) {
                return {false,
                        fmt("iter %d policy %zu (l=%d h=%d i=%d j=%d): "
                            "%.17g vs oracle %.17g",
                            iter, p, l, h, i, j, got.at(i, j),
                            want[static_cast<std::size_t>(i)]
                                [static_cast<std::size_t>(j)])};
              }
            }
          }
        }
      }
    }
  }
  return {true, "100 cases x 4 policies match the scalar pipeline bit-exactly"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {"bf16 codec round-trip and rounding reference", check_bf16_codec},
      {"relative-position invariance in f64", check_relative_property},
      {"precision-gap separation on the reference stack",
       check_precision_gap},
      {"zero-shift identities are exact", check_zero_shift},
      {"mask compiler equals the visibility predicate", check_mask_oracle},
      {"anchor pair-count closed form and cost ratio", check_anchor_cost},
      {"packing and interleaving invariants", check_packing_invariants},
      {"softmax normalization and masking contract", check_softmax_contract},
      {"CLI byte determinism across reruns and threads",
       check_cli_determinism},
      {"forward pass equals the scalar oracle bit-exactly",
       check_scalar_oracle},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    const Outcome o = c.fn();
    std::printf("[%2d] %s  %s (%s)\n", index, o.pass ? "PASS" : "FAIL",
                c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  if (failures == 0) {
    std::printf("all %d acceptance checks passed\n", index);
  } else {
    std::printf("%d of %d acceptance checks failed\n", failures, index);
  }
  return failures == 0 ? 0 : 1;
}
