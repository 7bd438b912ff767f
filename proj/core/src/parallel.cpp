#include "contact/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace contact {

int worker_count(int requested) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int cap = hw;
  if (const char* env = std::getenv("CONTACT_SHAPE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) cap = v;
  }
  if (requested > 0) return std::min(requested, cap);
  return cap;
}

void parallel_for(long n, const std::function<void(long)>& fn, int threads) {
  if (n <= 0) return;
  int workers = std::min<long>(worker_count(threads), n);
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace contact
