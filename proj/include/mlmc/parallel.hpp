#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace mlmc {

/// Worker count for a request of `threads` (0 means all hardware threads).
inline unsigned resolve_threads(unsigned threads) {
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  return threads;
}

/// Runs `body(begin, end)` over a static partition of [0, count).
///
/// Chunks are contiguous and processed in increasing index order inside each
/// worker. If several workers throw, the exception from the lowest chunk is
/// rethrown, which is the failure with the smallest index. Error reports are
/// therefore identical for every worker count.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>&
                             body) {
  if (count == 0) {
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(resolve_threads(threads), count);
  if (workers == 1) {
    body(0, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) {
      break;
    }
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace mlmc
