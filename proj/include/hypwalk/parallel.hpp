#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace hypwalk {

inline std::atomic<int>& thread_count_ref() {
  static std::atomic<int> n{1};
  return n;
}
inline void set_threads(int n) { thread_count_ref().store(n < 1 ? 1 : n); }
inline int threads() { return thread_count_ref().load(); }

// Deterministic chunked map-reduce over [0, total): chunks are processed in
// parallel but accumulators are combined in fixed chunk order, so the result
// is bit-identical for a given (seed, chunk_size) regardless of thread count.
//
// MapFn: Acc(std::uint64_t begin, std::uint64_t end, std::uint64_t chunk_index)
// CombineFn: void(Acc& into, const Acc& part)
template <typename Acc, typename MapFn, typename CombineFn>
Acc chunked_reduce(std::uint64_t total, std::uint64_t chunk_size, MapFn map, CombineFn combine) {
  if (chunk_size == 0) chunk_size = 1;
  std::uint64_t nchunks = (total + chunk_size - 1) / chunk_size;
  std::vector<Acc> parts(nchunks);
  int nthreads = threads();
  if (nthreads <= 1 || nchunks <= 1) {
    for (std::uint64_t c = 0; c < nchunks; ++c) {
      std::uint64_t b = c * chunk_size, e = std::min(total, b + chunk_size);
      parts[c] = map(b, e, c);
    }
  } else {
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::uint64_t c = next.fetch_add(1);
        if (c >= nchunks) return;
        std::uint64_t b = c * chunk_size, e = std::min(total, b + chunk_size);
        parts[c] = map(b, e, c);
      }
    };
    std::vector<std::thread> pool;
    int spawn = std::min<std::uint64_t>(nthreads, nchunks);
    pool.reserve(spawn);
    for (int i = 0; i < spawn; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  Acc out{};
  for (auto& p : parts) combine(out, p);
  return out;
}

// Mean/variance accumulator for MC estimates.
struct MeanAcc {
  double sum = 0.0;
  double sumsq = 0.0;
  std::uint64_t n = 0;

  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  void merge(const MeanAcc& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    n += o.n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double stderr_() const {
    if (n < 2) return 0.0;
    double m = mean();
    double var = (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    if (var < 0) var = 0;
    return std::sqrt(var / static_cast<double>(n));
  }
};

}  // namespace hypwalk
