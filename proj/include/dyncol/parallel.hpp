#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace dyncol {

struct ExecPolicy {
  int threads = 1;
};

// Chunked parallel loop. Each index writes only its own outputs, so the
// result is independent of the chunking and of `threads`.
template <class F>
void parallel_for(const ExecPolicy& pol, size_t n, F&& f) {
  const int t = pol.threads;
  if (t <= 1 || n < 1024) {
    for (size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const size_t chunk = (n + static_cast<size_t>(t) - 1) / static_cast<size_t>(t);
  std::vector<std::thread> workers;
  for (int w = 1; w < t; ++w) {
    const size_t lo = static_cast<size_t>(w) * chunk;
    if (lo >= n) break;
    const size_t hi = std::min(n, lo + chunk);
    workers.emplace_back([lo, hi, &f] {
      for (size_t i = lo; i < hi; ++i) f(i);
    });
  }
  const size_t hi0 = std::min(n, chunk);
  for (size_t i = 0; i < hi0; ++i) f(i);
  for (auto& th : workers) th.join();
}

}  // namespace dyncol
