#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace greenlinker {

/// --threads value, else GREENLINKER_THREADS, else hardware concurrency.
int resolve_threads(std::optional<int> requested = std::nullopt);

/// Calls body(i) for i in [0, n) on a pool of threads. Work is handed out
/// in fixed chunks and every index writes only its own outputs, so results
/// do not depend on the thread count. The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body, std::size_t chunk = 16) {
  threads = std::max(1, threads);
  if (threads == 1 || n <= chunk) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= n) return;
      const std::size_t end = std::min(n, begin + chunk);
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), (n + chunk - 1) / chunk));
  pool.reserve(static_cast<std::size_t>(spawn));
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace greenlinker
