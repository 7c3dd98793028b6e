#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rbg {

/// Worker count from RBG_WORKERS, else the hardware concurrency.
inline unsigned default_workers() {
  if (const char* env = std::getenv("RBG_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on `workers` threads. Work is pulled by index so
/// results written to per-index slots do not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Chunked map-reduce over replications. Chunks have a fixed size independent
/// of the worker count and are merged in index order, so the reduction is
/// identical for any number of workers.
template <class Acc, class Fn>
Acc parallel_accumulate(std::size_t reps, unsigned workers, Fn&& per_rep,
                        std::size_t chunk = 64) {
  const std::size_t chunks = (reps + chunk - 1) / chunk;
  std::vector<Acc> partial(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t end = std::min(reps, (c + 1) * chunk);
    for (std::size_t r = c * chunk; r < end; ++r) per_rep(r, partial[c]);
  });
  Acc total{};
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace rbg
