#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace betacop::detail {

/// Splits [0, n_items) into contiguous chunks, one worker thread each.
/// Chunk boundaries depend only on n_items and the thread budget, and each
/// output slot is written by exactly one worker, so callers that reduce
/// per-slot results in a fixed order stay bit-deterministic.
/// The first exception thrown by a worker is rethrown after the join.
inline void parallel_chunks(std::size_t n_items, std::size_t min_per_thread,
                            const std::function<void(std::size_t, std::size_t)>& body) {
  std::size_t workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (min_per_thread > 0) workers = std::min(workers, std::max<std::size_t>(1, n_items / min_per_thread));
  if (workers <= 1 || n_items <= 1) {
    body(0, n_items);
    return;
  }
  const std::size_t chunk = (n_items + workers - 1) / workers;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk;
    if (b >= n_items) break;
    const std::size_t e = std::min(n_items, b + chunk);
    pool.emplace_back([&, b, e] {
      try {
        body(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

/// Numerically stable summation whose result does not depend on how the
/// inputs were produced, only on their order in the buffer.
inline double pairwise_sum(const double* data, std::size_t len) {
  if (len <= 16) {
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = len / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, len - half);
}

}  // namespace betacop::detail
