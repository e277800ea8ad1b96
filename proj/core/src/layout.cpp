// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ropelab/layout.hpp"

#include <map>
#include <string>

#include "ropelab/errors.hpp"

namespace ropelab {

BatchLayout contiguous_layout(std::span<const DocSpec> docs, bool with_anchor,
                              bool with_tags) {
  BatchLayout layout;
  if (with_anchor) {
    layout.tokens.push_back(Token{TokenRole::anchor, -1, 0, -1});
  }
  for (const DocSpec& doc : docs) {
    if (doc.len < 1) {
      throw ConfigError("document length must be >= 1, got " +
                        std::to_string(doc.len));
    }
    if (doc.id < 0) {
      throw ConfigError("document id must be >= 0, got " +
                        std::to_string(doc.id));
    }
    if (with_tags) {
      layout.tokens.push_back(Token{TokenRole::tag, doc.id, 0, -1});
    }
    for (int t = 0; t < doc.len; ++t) {
      layout.tokens.push_back(Token{TokenRole::doc, doc.id, 0, t});
    }
  }
  return layout;
}

std::optional<std::string> layout_violation(const BatchLayout& layout) {
  const auto& toks = layout.tokens;
  // Per-document walking state.
  struct DocState {
    int next_within = 0;
    int next_chunk = 0;
  };
  std::map<int, DocState> docs;
  int last_doc = -2;   // doc_id of the previous token (-2: nothing yet)
  int last_chunk = -1;

  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    switch (t.role) {
      case TokenRole::anchor:
        if (i != 0) {
          return "anchor token at index " + std::to_string(i) +
                 " (anchors may only sit at index 0)";
        }
        if (t.doc_id != -1) return "anchor token must carry doc_id -1";
        if (t.within_doc_index != -1) {
          return "anchor token must carry within_doc_index -1";
        }
        break;
      case TokenRole::tag: {
        if (t.doc_id < 0) return "tag token with negative doc_id";
        if (t.within_doc_index != -1) {
          return "tag token must carry within_doc_index -1";
        }
        if (i + 1 >= toks.size() || toks[i + 1].role != TokenRole::doc ||
            toks[i + 1].doc_id != t.doc_id ||
            toks[i + 1].chunk_id != t.chunk_id) {
          return "tag at index " + std::to_string(i) +
                 " is not followed by a doc token of its document and chunk";
        }
        break;
      }
      case TokenRole::doc: {
        if (t.doc_id < 0) return "doc token with negative doc_id";
        DocState& ds = docs[t.doc_id];
        if (t.within_doc_index != ds.next_within) {
          return "doc " + std::to_string(t.doc_id) + " token at index " +
                 std::to_string(i) + " has within_doc_index " +
                 std::to_string(t.within_doc_index) + ", expected " +
                 std::to_string(ds.next_within);
        }
        ds.next_within++;
        break;
      }
    }
    // Chunk contiguity: a (doc_id, chunk_id) group, including its tag, must
    // be one contiguous span, and a document's chunk ids must appear 0,1,2,...
    if (t.role != TokenRole::anchor) {
      DocState& ds = docs[t.doc_id];
      const bool continues =
          (t.doc_id == last_doc && t.chunk_id == last_chunk);
      if (!continues) {
        // Revisiting an already-closed chunk shows up here as an id below
        // next_chunk, so this one check covers contiguity and ordering both.
        if (t.chunk_id != ds.next_chunk) {
          return "doc " + std::to_string(t.doc_id) + " opens chunk " +
                 std::to_string(t.chunk_id) + " at index " +
                 std::to_string(i) + ", expected chunk " +
                 std::to_string(ds.next_chunk);
        }
        ds.next_chunk++;
      }
      last_doc = t.doc_id;
      last_chunk = t.chunk_id;
    } else {
      last_doc = -2;
      last_chunk = -1;
    }
  }
  return std::nullopt;
}

void validate_layout(const BatchLayout& layout) {
  if (auto why = layout_violation(layout)) {
    throw LayoutError(*why);
  }
}

std::vector<int> doc_token_counts(const BatchLayout& layout) {
  int max_id = -1;
  for (const Token& t : layout.tokens) {
    if (t.role == TokenRole::doc && t.doc_id > max_id) max_id = t.doc_id;
  }
  std::vector<int> counts(static_cast<std::size_t>(max_id + 1), 0);
  for (const Token& t : layout.tokens) {
    if (t.role == TokenRole::doc) counts[static_cast<std::size_t>(t.doc_id)]++;
  }
  return counts;
}

const char* to_string(TokenRole role) {
  switch (role) {
    case TokenRole::anchor:
      return "anchor";
    case TokenRole::tag:
      return "tag";
    case TokenRole::doc:
      return "doc";
  }
  return "?";
}

}  // namespace ropelab
