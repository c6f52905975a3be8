#ifndef QUASIM_PARALLEL_HPP_
#define QUASIM_PARALLEL_HPP_

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace quasim {

// Runs fn(i) for i in [0, count) on up to `threads` workers.  Work is split
// into contiguous chunks; callers write results into preallocated slots by
// index, so output order never depends on scheduling.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = static_cast<std::size_t>(w) * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace quasim

#endif  // QUASIM_PARALLEL_HPP_
