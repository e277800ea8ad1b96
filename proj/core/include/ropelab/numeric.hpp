// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ropelab {

// Every summation in this library uses one fixed reduction tree so that
// results are bit-reproducible across runs and thread counts.
//
// The tree is bottom-up pairwise halving: on each level adjacent elements
// combine in index order (v[0]+v[1], v[2]+v[3], ...) and an odd trailing
// element passes through to the next level unchanged. The shape depends only
// on the element count, never on chunking or parallelism. An empty span sums
// to zero.
template <typename T>
T pairwise_sum_in_place(std::span<T> v) {
  std::size_t n = v.size();
  if (n == 0) return T(0);
  while (n > 1) {
    const std::size_t m = n / 2;
    for (std::size_t k = 0; k < m; ++k) {
      v[k] = v[2 * k] + v[2 * k + 1];
    }
    if (n % 2 != 0) {
      v[m] = v[n - 1];
      n = m + 1;
    } else {
      n = m;
    }
  }
  return v[0];
}

// Non-destructive variant; `scratch` is resized as needed and trashed.
template <typename T>
T pairwise_sum(std::span<const T> v, std::vector<T>& scratch) {
  scratch.assign(v.begin(), v.end());
  return pairwise_sum_in_place(std::span<T>(scratch));
}

template <typename T>
T pairwise_sum(std::span<const T> v) {
  std::vector<T> scratch;
  return pairwise_sum(v, scratch);
}

// Dot product with the products formed and reduced entirely in T.
// Operands are cast element-wise into T before multiplying.
template <typename T, typename U>
T pairwise_dot(std::span<const U> a, std::span<const U> b,
               std::vector<T>& scratch) {
  scratch.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    scratch[i] = static_cast<T>(a[i]) * static_cast<T>(b[i]);
  }
  return pairwise_sum_in_place(std::span<T>(scratch));
}

}  // namespace ropelab
