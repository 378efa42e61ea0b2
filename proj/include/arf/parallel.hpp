#pragma once

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace arf {

// Worker count: ARF_THREADS env var, else hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("ARF_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static contiguous partition of [0, n) over worker threads.
// fn(thread_index, begin, end). Results must be merged by the caller in
// thread-index order so the reduction is reproducible for a fixed count.
template <typename Fn>
inline void parallel_chunks(int64_t n, Fn&& fn, int threads = thread_count()) {
  if (n <= 0) return;
  if (threads > n) threads = static_cast<int>(n);
  if (threads <= 1) {
    fn(0, int64_t(0), n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int64_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int64_t b = t * chunk;
    const int64_t e = std::min<int64_t>(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, t, b, e] { fn(t, b, e); });
  }
  for (auto& th : pool) th.join();
}

template <typename Fn>
inline void parallel_for(int64_t n, Fn&& fn, int threads = thread_count()) {
  parallel_chunks(
      n,
      [&fn](int, int64_t b, int64_t e) {
        for (int64_t i = b; i < e; ++i) fn(i);
      },
      threads);
}

}  // namespace arf
