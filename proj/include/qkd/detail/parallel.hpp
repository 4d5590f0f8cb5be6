#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

namespace qkd::detail {

// Runs fn(i) for i in [0, count) across hardware threads with static
// chunking. Callers write results into slots indexed by i, and any reduction
// happens afterwards in index order, so the outcome is identical for any
// thread count (including 1).
template <typename Fn>
void parallel_for(std::uint64_t count, Fn&& fn) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (workers == 1 || count < 4 * workers) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::uint64_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = std::min<std::uint64_t>(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::uint64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace qkd::detail
