// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ropelab/layout.hpp"

namespace ropelab {

// Masking schemes. All are causal (j <= i); they differ in which earlier
// tokens stay visible and how position ids are assigned.
//
//   full_causal:        every earlier token is visible; continuous ids.
//   intra_doc:          only same-document tokens; continuous ids.
//   intra_doc_reset:    only same-document tokens; ids restart per document.
//   anchor:             same-document tokens plus the shared anchor at 0.
//   anchor_tag:         as anchor, with a tag token opening each document.
//   interleaved_intra:  intra_doc applied to a chunk-interleaved layout.
//   interleaved_anchor: anchor applied to a chunk-interleaved layout.
//
// Visibility depends only on document membership, never on token order, so
// interleaving a layout does not change which pairs attend.
enum class MaskScheme {
  full_causal,
  intra_doc,
  intra_doc_reset,
  anchor,
  anchor_tag,
  interleaved_intra,
  interleaved_anchor,
};

// Closed index range [lo, hi], 0 <= lo <= hi.
struct Interval {
  int lo = 0;
  int hi = 0;

  friend bool operator==(Interval, Interval) = default;
};

// Executable attention plan: per query row, the sorted, non-adjacent,
// non-overlapping column intervals it may attend to. Every row contains its
// own diagonal index. pair_count is the total number of allowed (i, j) pairs
// and is the cost model: attention work is proportional to attended pairs.
struct AttentionPlan {
  int T = 0;
  MaskScheme scheme = MaskScheme::full_causal;
  std::vector<std::vector<Interval>> rows;  // size T
  std::vector<int> position_ids;            // size T
  std::vector<std::uint8_t> loss_mask;      // size T; 1 on doc tokens only
  std::int64_t pair_count = 0;

  bool allows(int i, int j) const;
};

// Compile a layout under a scheme. Throws LayoutError if the layout is
// malformed or misses a scheme prerequisite (anchor schemes need the anchor
// token, anchor_tag needs a tag opening every document piece).
AttentionPlan compile(const BatchLayout& layout, MaskScheme scheme);

// All allowed pairs in row-major order: by i, then by j.
std::vector<std::pair<int, int>> enumerate_pairs(const AttentionPlan& plan);

// T*(T+1)/2: the attended pairs of a causal mask with no document structure.
std::int64_t full_causal_pair_count(int T);

// pair_count(scheme on layout) / full_causal_pair_count(layout size).
double pair_cost_ratio(const BatchLayout& layout, MaskScheme scheme);

// Printable mask grid: one line per row, '#' = attended, '.' = masked.
std::string render_ascii(const AttentionPlan& plan);

// JSON object with keys T, scheme, position_ids, loss_mask, rows (each
// {"i", "intervals": [[lo, hi], ...]}), pair_count.
std::string plan_to_json(const AttentionPlan& plan);

// True for schemes that require (and grant visibility to) an anchor token.
bool scheme_needs_anchor(MaskScheme scheme);
// True for schemes that require a tag before each document piece.
bool scheme_needs_tags(MaskScheme scheme);
// True for schemes defined over chunk-interleaved layouts.
bool scheme_interleaves(MaskScheme scheme);

std::optional<MaskScheme> parse_scheme(const std::string& name);
const char* to_string(MaskScheme scheme);

// Every scheme, in declaration order.
std::span<const MaskScheme> all_schemes();

}  // namespace ropelab
