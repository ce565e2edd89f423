#pragma once

// Minimal deterministic parallel-for: static block partition over a
// configurable thread count (set_threads, HSSEG_THREADS, default 1).
// Output never depends on scheduling; workers write disjoint ranges.

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hsseg {

inline int& thread_count() {
  static int n = [] {
    if (const char* env = std::getenv("HSSEG_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return v;
    }
    return 1;
  }();
  return n;
}

inline void set_threads(int n) {
  if (n >= 1) thread_count() = n;
}

template <typename F>
void parallel_for(std::int64_t begin, std::int64_t end, F&& body) {
  const int nt = thread_count();
  const std::int64_t n = end - begin;
  if (nt <= 1 || n < 2 * nt) {
    for (std::int64_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  const std::int64_t chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    std::int64_t lo = begin + t * chunk;
    std::int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &body] {
      for (std::int64_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace hsseg
