#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace causelab {

// Worker count: CAUSELAB_THREADS when set to a positive integer, else the
// hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("CAUSELAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

// Runs body(i) for i in [0, n). Each index is handled by exactly one worker,
// so callers that write into slot i get schedule-independent results. The
// first exception thrown by any worker is rethrown after all have joined.
template <typename Body>
void parallel_for(int n, Body&& body) {
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace causelab
