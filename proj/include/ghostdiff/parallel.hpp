#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ghostdiff {

/// Splits [0, count) into contiguous chunks and runs fn(begin, end, worker)
/// on up to `threads` workers. The first exception thrown is rethrown.
template <typename Index, typename Fn>
void parallel_for(Index count, int threads, Fn&& fn) {
  const Index workers = std::max<Index>(1, std::min<Index>(static_cast<Index>(threads), count));
  if (workers == 1) {
    fn(Index(0), count, 0);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    const Index begin = count * w / workers;
    const Index end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end, w] {
      try {
        fn(begin, end, static_cast<int>(w));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ghostdiff
