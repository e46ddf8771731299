#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace curator::util {

// Order-stable parallel map: fn(i) must be pure; results are written by
// index, so output is identical for any worker count.
template <typename Fn>
void parallel_for(size_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto body = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int count = workers > static_cast<int>(n) ? static_cast<int>(n)
                                                  : workers;
  pool.reserve(static_cast<size_t>(count));
  for (int t = 0; t < count; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
}

}  // namespace curator::util
