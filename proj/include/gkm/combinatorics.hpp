#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace gkm {

/// C(n+m-1, m) without overflow: returns `limit+1` as soon as the running
/// value exceeds `limit`.
inline std::uint64_t multiset_count_capped(std::uint64_t n, std::uint64_t m,
                                           std::uint64_t limit) {
  // C(n+m-1, m) computed as a product of ratios, left to right.
  long double acc = 1.0L;
  for (std::uint64_t i = 1; i <= m; ++i) {
    acc = acc * static_cast<long double>(n - 1 + i) / static_cast<long double>(i);
    if (acc > static_cast<long double>(limit)) return limit + 1;
  }
  return static_cast<std::uint64_t>(acc + 0.5L);
}

/// Visits every size-m multiset of {0..n-1} as a nondecreasing index vector,
/// in lexicographic order.
inline void for_each_multiset(int n, int m, const std::function<void(const std::vector<int>&)>& fn) {
  if (n <= 0 || m <= 0) return;
  std::vector<int> idx(m, 0);
  for (;;) {
    fn(idx);
    int pos = m - 1;
    while (pos >= 0 && idx[pos] == n - 1) --pos;
    if (pos < 0) return;
    int next = idx[pos] + 1;
    for (int i = pos; i < m; ++i) idx[i] = next;
  }
}

/// Visits every size-k subset of {0..n-1} as an increasing index vector, in
/// lexicographic order.
inline void for_each_combination(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k == 0) {
    fn(idx);
    return;
  }
  for (;;) {
    fn(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) return;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

/// Visits every partition of {0..n-1} into at most max_parts nonempty parts,
/// encoded as a restricted-growth string (a[i] = part of element i), in
/// lexicographic RGS order.
inline void for_each_set_partition(int n, int max_parts,
                                   const std::function<void(const std::vector<int>&, int)>& fn) {
  if (n <= 0 || max_parts <= 0) return;
  std::vector<int> a(n, 0);
  std::vector<int> prefix_max(n, 0);
  int pos = 1;
  if (n == 1) {
    fn(a, 1);
    return;
  }
  for (;;) {
    if (pos == n) {
      fn(a, prefix_max[n - 1] + 1);
      // Backtrack to the last position that can still be incremented.
      --pos;
      while (pos >= 1) {
        int cap = std::min(prefix_max[pos - 1] + 1, max_parts - 1);
        if (a[pos] < cap) break;
        --pos;
      }
      if (pos < 1) return;
      ++a[pos];
      prefix_max[pos] = std::max(prefix_max[pos - 1], a[pos]);
      ++pos;
      continue;
    }
    a[pos] = 0;
    prefix_max[pos] = prefix_max[pos - 1];
    ++pos;
  }
}

}  // namespace gkm
