#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace billiard {

/// Worker count: explicit setting, else BILLIARD_MC_THREADS, else hardware.
int worker_count();
void set_worker_count(int n);  // n <= 0 restores the default

/// Runs fn(i) for i in [0, n). Work is handed out in blocks through a shared
/// counter; fn must only write to slots owned by its index, which keeps the
/// result independent of the worker count.
template <typename Fn>
void parallel_for(std::int64_t n, const Fn& fn) {
  const int workers = worker_count();
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::int64_t block = std::max<std::int64_t>(1, n / (workers * 16));
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::int64_t begin = next.fetch_add(block);
      if (begin >= n || failed.load(std::memory_order_relaxed)) return;
      const std::int64_t end = std::min(begin + block, n);
      try {
        for (std::int64_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failed) std::rethrow_exception(error);
}

}  // namespace billiard
