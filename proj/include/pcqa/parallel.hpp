#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace pcqa {

inline int hardware_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Static contiguous partition of [0, n) over `threads` workers. Each worker
// receives its half-open range once, so per-range scratch can live on the
// worker's stack. Output must be written to per-index slots; the partition is
// a pure function of (n, threads), never of scheduling.
template <class Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn) {
  if (n == 0) return;
  threads = std::max(1, threads);
  const std::size_t nt = std::min<std::size_t>(threads, n);
  if (nt == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + nt - 1) / nt;
  std::vector<std::thread> workers;
  workers.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& w : workers) w.join();
}

}  // namespace pcqa
