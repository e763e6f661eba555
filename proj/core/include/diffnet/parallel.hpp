#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace diffnet {

// Runs fn(begin, end) over a contiguous partition of [0, n). The partition
// depends only on (n, threads), so workers that write into indexed slots
// produce identical buffers for any thread count.
template <class Fn>
void parallel_ranges(std::int64_t n, int threads, Fn&& fn) {
  if (n <= 0) return;
  const int workers =
      static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(threads, n)));
  if (workers == 1) {
    fn(std::int64_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::int64_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace diffnet
