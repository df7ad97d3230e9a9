#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace credaug {

/// Process-wide worker count used by parallel_for. Defaults to 1. Every
/// parallel code path in the library writes results into per-index slots, so
/// output never depends on this value.
void set_num_threads(int n) noexcept;
int num_threads() noexcept;

/// Runs fn(i) for i in [0, n), split into contiguous chunks across workers.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(num_threads()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace credaug
