#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lyricgenre {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Callers write results
/// into slot i, so output order never depends on scheduling. The exception
/// from the lowest failing index is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = n;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  {
    std::vector<std::jthread> threads;
    threads.reserve(count);
    for (unsigned t = 0; t < count; ++t) threads.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace lyricgenre
