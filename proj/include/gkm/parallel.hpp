#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace gkm {

/// Runs fn(chunk, begin, end) over a static split of [0, n) into at most
/// `threads` contiguous chunks. Chunk boundaries depend only on (n, threads),
/// and callers write results into disjoint preallocated slots, so reductions
/// done afterwards in slot order are identical at every thread count.
inline int parallel_chunks(long n, int threads,
                           const std::function<void(int, long, long)>& fn) {
  if (n <= 0) return 0;
  long workers = std::min<long>(std::max(threads, 1), n);
  if (workers <= 1) {
    fn(0, 0, n);
    return 1;
  }
  long chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  int used = 0;
  for (long w = 0; w < workers; ++w) {
    long lo = w * chunk;
    long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    ++used;
    pool.emplace_back([&fn, w, lo, hi] { fn(static_cast<int>(w), lo, hi); });
  }
  for (auto& t : pool) t.join();
  return used;
}

/// Number of chunks parallel_chunks will use for (n, threads).
inline int parallel_chunk_count(long n, int threads) {
  if (n <= 0) return 0;
  long workers = std::min<long>(std::max(threads, 1), n);
  if (workers <= 1) return 1;
  long chunk = (n + workers - 1) / workers;
  return static_cast<int>((n + chunk - 1) / chunk);
}

}  // namespace gkm
