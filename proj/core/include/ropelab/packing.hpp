// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ropelab/layout.hpp"
#include "ropelab/mask.hpp"

namespace ropelab {

// Controls document chunking for interleaved layouts.
struct ChunkPolicy {
  int max_chunks = 4;
};

// Split each document into k contiguous chunks, k drawn uniformly from
// [1, min(max_chunks, len)] with k-1 distinct split points chosen uniformly,
// then merge the per-document chunk streams into one sequence, drawing each
// next chunk with probability proportional to the documents' remaining chunk
// counts (a uniform pick over all order-preserving interleavings).
//
// The result contains doc tokens only; within_doc_index keeps counting across
// chunks of the same document. Deterministic in (docs, policy, seed).
BatchLayout interleave_chunks(std::span<const DocSpec> docs, ChunkPolicy policy,
                              std::uint64_t seed);

// Prepend an anchor token (index 0) to a layout.
BatchLayout with_anchor(const BatchLayout& layout);

// Controls greedy packing of documents into fixed-size windows.
struct PackPolicy {
  int window = 0;
  MaskScheme scheme = MaskScheme::full_causal;
};

// Pack documents into windows of exactly `policy.window` tokens (the last
// window may be shorter), filling greedily in input order. A document longer
// than the space left in a window splits at the boundary and continues in the
// next one; within_doc_index restarts at 0 for each window's piece. Anchor
// schemes put an anchor at the front of every window; anchor_tag additionally
// opens every document piece with a tag. Documents of length zero are
// rejected; an empty input yields an empty vector.
std::vector<BatchLayout> pack_documents(std::span<const int> lengths,
                                        const PackPolicy& policy);

// Convenience: build the layout a scheme is defined over, from document
// lengths alone. Contiguous for the non-interleaved schemes (with anchor/tags
// as required), chunk-interleaved for the interleaved ones.
BatchLayout layout_for_scheme(std::span<const DocSpec> docs, MaskScheme scheme,
                              std::uint64_t seed, int max_chunks = 4);

}  // namespace ropelab
