#include "billiard/parallel.hpp"

#include <cstdlib>

namespace billiard {

namespace {
std::atomic<int> g_workers{0};
}

int worker_count() {
  const int set = g_workers.load(std::memory_order_relaxed);
  if (set > 0) return set;
  if (const char* env = std::getenv("BILLIARD_MC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void set_worker_count(int n) { g_workers.store(n, std::memory_order_relaxed); }

}  // namespace billiard
