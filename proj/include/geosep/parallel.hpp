#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace geosep {

// Worker count from a flag value, falling back to GEOSEP_WORKERS and then
// to the hardware concurrency. Zero means "not set".
std::size_t resolve_workers(std::size_t requested);

// Calls fn(i) for every i in [0, n) across `workers` threads. Work is handed
// out in fixed-size chunks; callers write results by index, so output order
// never depends on scheduling. The first exception thrown by fn is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn, std::size_t chunk = 16) {
  workers = std::max<std::size_t>(1, std::min(workers, (n + chunk - 1) / std::max<std::size_t>(chunk, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto body = [&] {
    for (;;) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= n) return;
      const std::size_t end = std::min(n, begin + chunk);
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace geosep
