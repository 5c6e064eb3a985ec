#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace bpdl::sim {

/// Thread count: `requested` when positive, else the BPDL_THREADS
/// environment variable, else the hardware concurrency.
int resolve_threads(int requested = 0);

/// Runs fn(replicate_id) for ids 0..n-1 on a pool of threads and returns the
/// results in id order. Each replicate must derive its randomness from its
/// id alone (Rng::stream), which makes the output independent of the
/// thread count. The first exception thrown by any replicate is rethrown.
template <class Fn>
auto run_fleet(std::size_t n, int threads, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<R> out(n);
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, resolve_threads(threads))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t id = next.fetch_add(1);
      if (id >= n) return;
      try {
        out[id] = fn(id);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace bpdl::sim
