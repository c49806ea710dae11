#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ptmatch {

// Runs body(state, i) for i in [0, count) on up to `threads` workers. Each
// worker owns one state from make_state(). Indices are handed out in chunks;
// callers write results into per-index slots so output never depends on
// scheduling. The first exception thrown by any worker is rethrown.
template <class MakeState, class Body>
void parallel_for(std::size_t count, int threads, MakeState make_state, Body body) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count));
  if (workers <= 1) {
    if (count == 0) return;
    auto state = make_state();
    for (std::size_t i = 0; i < count; ++i) body(state, i);
    return;
  }
  constexpr std::size_t kChunk = 16;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        auto state = make_state();
        for (;;) {
          const std::size_t begin = next.fetch_add(kChunk);
          if (begin >= count) break;
          const std::size_t end = std::min(count, begin + kChunk);
          for (std::size_t i = begin; i < end; ++i) body(state, i);
        }
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ptmatch
