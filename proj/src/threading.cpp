#include "dgl/threading.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace dgl {

int max_threads() {
  if (const char* env = std::getenv("DGL_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(Index n, const std::function<void(Index)>& body,
                  int threads) {
  if (n <= 0) return;
  int t = threads > 0 ? threads : max_threads();
  t = static_cast<int>(std::min<Index>(t, n));
  if (t <= 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  Index chunk = (n + t - 1) / t;
  for (int w = 0; w < t; ++w) {
    Index begin = w * chunk;
    Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] {
      for (Index i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace dgl
