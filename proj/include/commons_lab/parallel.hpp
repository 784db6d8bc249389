#pragma once

// Worker fan-out for embarrassingly parallel grids (basin cells, sweep
// points). COMMONS_LAB_THREADS caps the worker count; 0 or unset means one
// worker per hardware thread.

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace commons_lab {

inline int worker_count() {
  int workers = 0;
  if (const char* env = std::getenv("COMMONS_LAB_THREADS")) {
    try {
      workers = std::stoi(env);
    } catch (const std::exception&) {
      workers = 0;
    }
  }
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 0) workers = 1;
  return workers;
}

// Runs fn(i) for i in [0, n) on static index blocks. Each index writes only
// its own output slot, so results are identical for any worker count. The
// first exception thrown by a worker is rethrown on the calling thread.
template <class Fn>
void parallel_for(long long n, Fn&& fn) {
  const int workers = std::min<long long>(worker_count(), n > 0 ? n : 1);
  if (workers <= 1) {
    for (long long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const long long chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const long long begin = w * chunk;
    const long long end = std::min(n, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        for (long long i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace commons_lab
