#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace alloylab {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Tasks write to
// per-index slots only, so results do not depend on the worker count.
inline void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<std::int64_t>(workers, n));
  pool.reserve(count);
  for (int t = 0; t < count; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n-1)
  double half_width = 0.0;  // 1.96 * std / sqrt(n)
  int n = 0;
};

inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd r;
  r.n = static_cast<int>(v.size());
  if (r.n == 0) return r;
  double s = 0.0;
  bool constant = true;
  for (double x : v) {
    s += x;
    constant = constant && x == v.front();
  }
  r.mean = constant ? v.front() : s / r.n;
  if (r.n >= 2 && !constant) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(ss / (r.n - 1));
    r.half_width = 1.96 * r.std / std::sqrt(static_cast<double>(r.n));
  }
  return r;
}

}  // namespace alloylab
