// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ropelab {

// Token roles in a packed training window.
//   anchor: shared sink token at index 0, owned by no document.
//   tag:    per-document marker sitting immediately before the document's
//           first token (or the first token of each packed piece).
//   doc:    ordinary document token.
enum class TokenRole { anchor, tag, doc };

struct Token {
  TokenRole role = TokenRole::doc;
  int doc_id = -1;           // anchor: -1; tag: id of the document it opens
  int chunk_id = 0;          // which contiguous piece of its document
  int within_doc_index = -1; // doc tokens: 0-based position inside the
                             // document (restarts per packed window);
                             // anchor/tag: -1
};

// One attention window: a flat token sequence. Layouts are produced by the
// builders below or deserialized from JSON; compile() turns a layout plus a
// masking scheme into an executable plan.
struct BatchLayout {
  std::vector<Token> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
};

// Input description of one document.
struct DocSpec {
  int id = 0;
  int len = 0;
  std::string domain;  // optional free-form label, carried but uninterpreted
};

// All documents laid out back to back in input order, optionally with a
// leading anchor and a tag before each document.
BatchLayout contiguous_layout(std::span<const DocSpec> docs, bool with_anchor,
                              bool with_tags);

// First structural violation in the layout, or nullopt if it is well formed.
// Checked rules: at most one anchor and only at index 0; tags carry a valid
// doc_id and directly precede a doc token of that document and chunk; each
// document's within_doc_index runs 0,1,2,... in sequence order; each
// (doc_id, chunk_id) group is contiguous and chunk ids appear in order.
std::optional<std::string> layout_violation(const BatchLayout& layout);

// Throws LayoutError if layout_violation() reports anything.
void validate_layout(const BatchLayout& layout);

// Number of doc-role tokens per doc_id (index = doc_id; ids must be dense).
std::vector<int> doc_token_counts(const BatchLayout& layout);

const char* to_string(TokenRole role);

}  // namespace ropelab
