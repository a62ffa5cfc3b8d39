#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace hbmo {

// Worker count: HBMO_THREADS overrides hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("HBMO_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(begin, end) over [0, count) split in contiguous chunks.
// Each index is visited by exactly one worker, so results written per-index
// are identical to a serial run.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  int workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

// Deterministic parallel reduction: per-chunk accumulators merged in chunk
// order, independent of thread scheduling.
template <class Acc, class Fn, class Merge>
Acc parallel_reduce(std::size_t count, Acc init, Fn&& fn, Merge&& merge) {
  int workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    Acc acc = init;
    for (std::size_t i = 0; i < count; ++i) fn(acc, i);
    return acc;
  }
  std::size_t chunk = (count + workers - 1) / workers;
  std::vector<Acc> partial(workers, init);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, &partial, w, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(partial[w], i);
    });
  }
  for (auto& t : pool) t.join();
  Acc acc = init;
  for (const Acc& p : partial) merge(acc, p);
  return acc;
}

}  // namespace hbmo
