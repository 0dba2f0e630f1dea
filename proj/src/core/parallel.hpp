#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace dtlab {

// Process-wide worker count for data-parallel loops (1 = serial).
void set_worker_count(int n);
int worker_count();

// Runs fn(i) for i in [0, n) split into contiguous blocks, one per worker.
// Results must not depend on the partitioning; every call site writes to
// disjoint slots or reduces associatively, so the output is identical for
// any worker count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int workers = worker_count();
  if (workers <= 1 || n < 2048) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunks = static_cast<std::size_t>(workers);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t b = n * c / chunks;
    const std::size_t e = n * (c + 1) / chunks;
    pool.emplace_back([&fn, b, e] {
      for (std::size_t i = b; i < e; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace dtlab
