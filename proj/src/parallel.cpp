#include "rectnet/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace rectnet {

unsigned default_threads() {
  if (const char* env = std::getenv("RECTNET_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn, unsigned threads) {
  if (threads == 0) threads = default_threads();
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  const unsigned use = static_cast<unsigned>(std::min<size_t>(threads, n));
  pool.reserve(use);
  for (unsigned k = 0; k < use; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace rectnet
