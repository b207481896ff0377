#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace phidiv {

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Runs fn(begin, end) over a contiguous partition of [0, count) across
/// `threads` workers. Work item i is always in the same chunk position, and
/// callers write results into per-index slots, so output is independent of
/// scheduling.
template <typename Fn>
void parallel_chunks(std::size_t count, std::size_t threads, const Fn& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  threads = std::min(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(begin + chunk, count);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace phidiv
