#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lowdisc {

/// Worker count used by all parallel loops. Initialized from LOWDISC_THREADS
/// (capped by hardware concurrency when unset).
unsigned thread_count();
void set_thread_count(unsigned n);

/// Runs body(i) for i in [0, n) over a static partition. Bodies must write
/// only to slots owned by their index; reductions happen afterwards in index
/// order, which keeps results independent of the worker count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(thread_count(), n == 0 ? 1 : n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  // The failure with the smallest index wins, independent of scheduling.
  std::exception_ptr failure;
  std::size_t failure_index = n;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (i < failure_index) {
            failure_index = i;
            failure = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace lowdisc
