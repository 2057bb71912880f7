#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qecho {

/// Maps fn over [0, count) on `threads` workers. Index order of side effects
/// is unspecified but each index runs exactly once; callers own any output
/// slot per index, so results are independent of the worker count. The first
/// exception is rethrown on the calling thread. If `cancel` is set, indices
/// not yet claimed are skipped.
template <class Fn>
void parallel_for(long count, int threads, Fn&& fn,
                  const std::atomic<bool>* cancel = nullptr) {
  if (threads < 1) threads = 1;
  if (count <= 0) return;
  if (threads == 1) {
    for (long i = 0; i < count; ++i) {
      if (cancel && cancel->load(std::memory_order_relaxed)) return;
      fn(i);
    }
    return;
  }
  std::atomic<long> next(0);
  std::atomic<bool> failed(false);
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      if (cancel && cancel->load(std::memory_order_relaxed)) return;
      const long i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(size_t(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace qecho
