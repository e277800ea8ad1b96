// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ropelab/packing.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "ropelab/errors.hpp"
#include "ropelab/rng.hpp"

namespace ropelab {

namespace {

struct Chunk {
  int len = 0;
};

// k-1 distinct split points from the len-1 internal boundaries, by a partial
// Fisher-Yates shuffle (deterministic in the engine state), then sorted.
std::vector<int> chunk_lengths(int len, int k, std::mt19937_64& g) {
  std::vector<int> boundaries(static_cast<std::size_t>(len - 1));
  std::iota(boundaries.begin(), boundaries.end(), 1);
  for (int i = 0; i < k - 1; ++i) {
    const auto j =
        static_cast<std::size_t>(i) +
        rng::below(g, static_cast<std::uint64_t>(len - 1 - i));
    std::swap(boundaries[static_cast<std::size_t>(i)], boundaries[j]);
  }
  std::vector<int> cuts(boundaries.begin(), boundaries.begin() + (k - 1));
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> lens;
  int prev = 0;
  for (int c : cuts) {
    lens.push_back(c - prev);
    prev = c;
  }
  lens.push_back(len - prev);
  return lens;
}

}  // namespace

BatchLayout interleave_chunks(std::span<const DocSpec> docs, ChunkPolicy policy,
                              std::uint64_t seed) {
  if (policy.max_chunks < 1) {
    throw ConfigError("max_chunks must be >= 1, got " +
                      std::to_string(policy.max_chunks));
  }
  std::mt19937_64 g(seed);

  // Draw order is fixed: first each document's chunking in input order, then
  // the merge picks. Changing one phase never perturbs the other's draws.
  std::vector<std::vector<Chunk>> chunks;
  chunks.reserve(docs.size());
  for (const DocSpec& doc : docs) {
    if (doc.len < 1) {
      throw ConfigError("document length must be >= 1, got " +
                        std::to_string(doc.len));
    }
    const int k_max = std::min(policy.max_chunks, doc.len);
    const int k =
        1 + static_cast<int>(rng::below(g, static_cast<std::uint64_t>(k_max)));
    std::vector<Chunk> cs;
    for (int len : chunk_lengths(doc.len, k, g)) {
      cs.push_back(Chunk{len});
    }
    chunks.push_back(std::move(cs));
  }

  // Merge: each step picks a document with probability proportional to its
  // remaining chunk count, which samples order-preserving interleavings
  // uniformly.
  std::vector<std::size_t> next_chunk(docs.size(), 0);
  std::vector<int> next_within(docs.size(), 0);
  std::int64_t remaining = 0;
  for (const auto& cs : chunks) {
    remaining += static_cast<std::int64_t>(cs.size());
  }

  BatchLayout layout;
  while (remaining > 0) {
    std::uint64_t pick = rng::below(g, static_cast<std::uint64_t>(remaining));
    std::size_t d = 0;
    for (;; ++d) {
      const std::uint64_t left = chunks[d].size() - next_chunk[d];
      if (pick < left) break;
      pick -= left;
    }
    const DocSpec& doc = docs[d];
    const Chunk& c = chunks[d][next_chunk[d]];
    const int chunk_id = static_cast<int>(next_chunk[d]);
    for (int t = 0; t < c.len; ++t) {
      layout.tokens.push_back(
          Token{TokenRole::doc, doc.id, chunk_id, next_within[d]++});
    }
    next_chunk[d]++;
    remaining--;
  }
  return layout;
}

BatchLayout with_anchor(const BatchLayout& layout) {
  BatchLayout out;
  out.tokens.reserve(layout.tokens.size() + 1);
  out.tokens.push_back(Token{TokenRole::anchor, -1, 0, -1});
  out.tokens.insert(out.tokens.end(), layout.tokens.begin(),
                    layout.tokens.end());
  return out;
}

std::vector<BatchLayout> pack_documents(std::span<const int> lengths,
                                        const PackPolicy& policy) {
  const bool anchored = scheme_needs_anchor(policy.scheme);
  const bool tagged = scheme_needs_tags(policy.scheme);
  const int overhead = (anchored ? 1 : 0);
  const int per_piece = (tagged ? 1 : 0);
  // Smallest window that can hold anchor (+ tag) + one doc token.
  const int min_window = overhead + per_piece + 1;
  if (policy.window < min_window) {
    throw ConfigError("window must be >= " + std::to_string(min_window) +
                      " for scheme " + to_string(policy.scheme) + ", got " +
                      std::to_string(policy.window));
  }
  for (int len : lengths) {
    if (len < 1) {
      throw ConfigError("document length must be >= 1, got " +
                        std::to_string(len));
    }
  }

  std::vector<BatchLayout> windows;
  BatchLayout current;
  auto space = [&] { return policy.window - current.size(); };
  auto open_window = [&] {
    current = BatchLayout{};
    if (anchored) {
      current.tokens.push_back(Token{TokenRole::anchor, -1, 0, -1});
    }
  };
  auto close_window = [&] {
    if (current.size() > overhead) {
      windows.push_back(std::move(current));
    }
    current = BatchLayout{};
  };

  open_window();
  for (std::size_t d = 0; d < lengths.size(); ++d) {
    int remaining = lengths[d];
    while (remaining > 0) {
      // A piece needs room for its tag plus at least one doc token.
      if (space() < per_piece + 1) {
        close_window();
        open_window();
      }
      if (tagged) {
        current.tokens.push_back(
            Token{TokenRole::tag, static_cast<int>(d), 0, -1});
      }
      const int take = std::min(remaining, space());
      // within_doc_index restarts at 0 in every window.
      for (int t = 0; t < take; ++t) {
        current.tokens.push_back(
            Token{TokenRole::doc, static_cast<int>(d), 0, t});
      }
      remaining -= take;
    }
  }
  close_window();
  return windows;
}

BatchLayout layout_for_scheme(std::span<const DocSpec> docs, MaskScheme scheme,
                              std::uint64_t seed, int max_chunks) {
  if (scheme_interleaves(scheme)) {
    BatchLayout layout = interleave_chunks(docs, ChunkPolicy{max_chunks}, seed);
    if (scheme_needs_anchor(scheme)) {
      layout = with_anchor(layout);
    }
    return layout;
  }
  return contiguous_layout(docs, scheme_needs_anchor(scheme),
                           scheme_needs_tags(scheme));
}

}  // namespace ropelab
