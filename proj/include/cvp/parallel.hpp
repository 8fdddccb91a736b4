#ifndef CVP_PARALLEL_HPP
#define CVP_PARALLEL_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace cvp {

// Worker count: min(hardware, CVP_THREADS). Results must be written to
// disjoint slots so the outcome is independent of the thread count.
inline int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("CVP_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(hw);
}

template <class F>
void parallel_for(long n, F&& body) {
  int nw = worker_count();
  if (n <= 0) return;
  if (nw <= 1 || n < 4) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  long chunk = (n + nw - 1) / nw;
  for (int w = 0; w < nw; ++w) {
    long lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (long i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace cvp

#endif
