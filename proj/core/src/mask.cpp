// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ropelab/mask.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "ropelab/errors.hpp"

namespace ropelab {

namespace {

constexpr MaskScheme kAllSchemes[] = {
    MaskScheme::full_causal,       MaskScheme::intra_doc,
    MaskScheme::intra_doc_reset,   MaskScheme::anchor,
    MaskScheme::anchor_tag,        MaskScheme::interleaved_intra,
    MaskScheme::interleaved_anchor,
};

void check_scheme_prerequisites(const BatchLayout& layout, MaskScheme scheme) {
  if (scheme_needs_anchor(scheme)) {
    if (layout.tokens.empty() || layout.tokens[0].role != TokenRole::anchor) {
      throw LayoutError(std::string(to_string(scheme)) +
                        " requires an anchor token at index 0");
    }
  }
  if (scheme_needs_tags(scheme)) {
    // Every (doc_id, chunk_id) group must open with a tag.
    int last_doc = -2, last_chunk = -1;
    for (std::size_t i = 0; i < layout.tokens.size(); ++i) {
      const Token& t = layout.tokens[i];
      if (t.role == TokenRole::anchor) {
        last_doc = -2;
        continue;
      }
      const bool opens_group =
          !(t.doc_id == last_doc && t.chunk_id == last_chunk);
      if (opens_group && t.role != TokenRole::tag) {
        throw LayoutError(std::string(to_string(scheme)) +
                          " requires a tag before the doc tokens at index " +
                          std::to_string(i));
      }
      last_doc = t.doc_id;
      last_chunk = t.chunk_id;
    }
  }
}

}  // namespace

bool AttentionPlan::allows(int i, int j) const {
  if (i < 0 || i >= T || j < 0 || j >= T) return false;
  const auto& row = rows[static_cast<std::size_t>(i)];
  auto it = std::upper_bound(
      row.begin(), row.end(), j,
      [](int v, const Interval& iv) { return v < iv.lo; });
  if (it == row.begin()) return false;
  --it;
  return j <= it->hi;
}

AttentionPlan compile(const BatchLayout& layout, MaskScheme scheme) {
  validate_layout(layout);
  check_scheme_prerequisites(layout, scheme);

  const int T = layout.size();
  AttentionPlan plan;
  plan.T = T;
  plan.scheme = scheme;
  plan.rows.resize(static_cast<std::size_t>(T));
  plan.position_ids.resize(static_cast<std::size_t>(T));
  plan.loss_mask.resize(static_cast<std::size_t>(T));

  const bool doc_scoped = scheme != MaskScheme::full_causal;
  const bool anchored = scheme_needs_anchor(scheme);
  const bool reset_ids = scheme == MaskScheme::intra_doc_reset;

  // Visibility depends only on document membership, so each row's intervals
  // are the prefix of its document's runs (plus the anchor column). Runs are
  // maintained incrementally: extending by one token either lengthens the
  // last run or opens a new one, which keeps them sorted and non-adjacent.
  std::map<int, std::vector<Interval>> runs;
  std::map<int, int> id_counter;  // per-doc position counter for reset ids

  for (int i = 0; i < T; ++i) {
    const Token& tok = layout.tokens[static_cast<std::size_t>(i)];

    plan.loss_mask[static_cast<std::size_t>(i)] =
        tok.role == TokenRole::doc ? 1 : 0;
    if (reset_ids) {
      plan.position_ids[static_cast<std::size_t>(i)] = id_counter[tok.doc_id]++;
    } else {
      plan.position_ids[static_cast<std::size_t>(i)] = i;
    }

    auto& row = plan.rows[static_cast<std::size_t>(i)];
    if (!doc_scoped) {
      row.push_back(Interval{0, i});
    } else {
      std::vector<Interval>& doc_runs = runs[tok.doc_id];
      if (!doc_runs.empty() && doc_runs.back().hi == i - 1) {
        doc_runs.back().hi = i;
      } else {
        doc_runs.push_back(Interval{i, i});
      }
      row = doc_runs;
      if (anchored && tok.doc_id != -1) {
        if (row.front().lo == 1) {
          row.front().lo = 0;  // document starts right after the anchor
        } else {
          row.insert(row.begin(), Interval{0, 0});
        }
      }
    }
    for (const Interval& iv : row) {
      plan.pair_count += iv.hi - iv.lo + 1;
    }
  }
  return plan;
}

std::vector<std::pair<int, int>> enumerate_pairs(const AttentionPlan& plan) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(plan.pair_count));
  for (int i = 0; i < plan.T; ++i) {
    for (const Interval& iv : plan.rows[static_cast<std::size_t>(i)]) {
      for (int j = iv.lo; j <= iv.hi; ++j) {
        pairs.emplace_back(i, j);
      }
    }
  }
  return pairs;
}

std::int64_t full_causal_pair_count(int T) {
  const auto t = static_cast<std::int64_t>(T);
  return t * (t + 1) / 2;
}

double pair_cost_ratio(const BatchLayout& layout, MaskScheme scheme) {
  if (layout.size() == 0) {
    throw ConfigError("pair_cost_ratio: empty layout");
  }
  const AttentionPlan plan = compile(layout, scheme);
  return static_cast<double>(plan.pair_count) /
         static_cast<double>(full_causal_pair_count(plan.T));
}

std::string render_ascii(const AttentionPlan& plan) {
  std::string out;
  out.reserve(static_cast<std::size_t>(plan.T) *
              (static_cast<std::size_t>(plan.T) + 1));
  for (int i = 0; i < plan.T; ++i) {
    std::string line(static_cast<std::size_t>(plan.T), '.');
    for (const Interval& iv : plan.rows[static_cast<std::size_t>(i)]) {
      for (int j = iv.lo; j <= iv.hi; ++j) {
        line[static_cast<std::size_t>(j)] = '#';
      }
    }
    out += line;
    out += '\n';
  }
  return out;
}

std::string plan_to_json(const AttentionPlan& plan) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < plan.T; ++i) {
    nlohmann::json intervals = nlohmann::json::array();
    for (const Interval& iv : plan.rows[static_cast<std::size_t>(i)]) {
      intervals.push_back({iv.lo, iv.hi});
    }
    rows.push_back({{"i", i}, {"intervals", intervals}});
  }
  nlohmann::json j{
      {"T", plan.T},
      {"scheme", to_string(plan.scheme)},
      {"position_ids", plan.position_ids},
      {"loss_mask", nlohmann::json::array()},
      {"rows", rows},
      {"pair_count", plan.pair_count},
  };
  for (std::uint8_t m : plan.loss_mask) {
    j["loss_mask"].push_back(m != 0);
  }
  return j.dump(2);
}

bool scheme_needs_anchor(MaskScheme scheme) {
  return scheme == MaskScheme::anchor || scheme == MaskScheme::anchor_tag ||
         scheme == MaskScheme::interleaved_anchor;
}

bool scheme_needs_tags(MaskScheme scheme) {
  return scheme == MaskScheme::anchor_tag;
}

bool scheme_interleaves(MaskScheme scheme) {
  return scheme == MaskScheme::interleaved_intra ||
         scheme == MaskScheme::interleaved_anchor;
}

std::optional<MaskScheme> parse_scheme(const std::string& name) {
  for (MaskScheme s : kAllSchemes) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

const char* to_string(MaskScheme scheme) {
  switch (scheme) {
    case MaskScheme::full_causal:
      return "full_causal";
    case MaskScheme::intra_doc:
      return "intra_doc";
    case MaskScheme::intra_doc_reset:
      return "intra_doc_reset";
    case MaskScheme::anchor:
      return "anchor";
    case MaskScheme::anchor_tag:
      return "anchor_tag";
    case MaskScheme::interleaved_intra:
      return "interleaved_intra";
    case MaskScheme::interleaved_anchor:
      return "interleaved_anchor";
  }
  return "?";
}

std::span<const MaskScheme> all_schemes() { return kAllSchemes; }

}  // namespace ropelab
