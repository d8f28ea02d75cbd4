#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace dbpot {

// Fans replicate indices over `workers` threads; results land in a vector
// indexed by replicate and are reduced by the caller in index order, so the
// outcome is bit-exact for any worker count.
template <typename Fn>
std::vector<double> run_replicates(std::uint64_t n, int workers, Fn&& fn) {
  std::vector<double> results(n);
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= n) return;
        results[i] = fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

inline double ordered_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

}  // namespace dbpot
