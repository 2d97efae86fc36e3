#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace esgea {

inline std::size_t default_thread_count() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(begin, end) over contiguous chunks of [0, n). Each index is
/// visited exactly once; results written by index are schedule-independent.
/// The first exception thrown by any worker is rethrown on the caller.
template <typename Body>
void parallel_for_chunks(std::size_t n, std::size_t threads, Body&& body) {
  if (n == 0) return;
  threads = std::clamp<std::size_t>(threads, 1, n);
  if (threads == 1) {
    body(std::size_t{0}, n);
    return;
  }
  // Interleaved small chunks balance uneven ball sizes better than n/threads blocks.
  const std::size_t chunk = std::max<std::size_t>(1, n / (threads * 8));
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      std::size_t begin = 0;
      {
        std::lock_guard lock(mu);
        if (next >= n || error) return;
        begin = next;
        next = std::min(n, next + chunk);
      }
      try {
        body(begin, std::min(n, begin + chunk));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace esgea
