#include "kinvlap/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace kinvlap {

int thread_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("KINVLAP_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<long>(n, cap);
  }
  return n;
}

void parallel_for(Index n, const std::function<void(Index, Index)>& chunk_fn) {
  if (n <= 0) return;
  const int workers = std::min<Index>(thread_count(), n);
  if (workers <= 1) {
    chunk_fn(0, n);
    return;
  }
  const Index chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&chunk_fn, begin, end] { chunk_fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace kinvlap
