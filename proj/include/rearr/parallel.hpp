#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rearr {

/// Dynamic index-parallel loop.  fn(i) must only write state owned by
/// index i (preallocated slots); then the result is identical for any
/// thread count, which the reproducibility contract relies on.
inline void parallel_for(long count, int threads,
                         const std::function<void(long)>& fn) {
  if (count <= 0) return;
  long tn = threads < 1 ? 1 : std::min<long>(threads, count);
  if (tn == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(tn));
  for (long t = 0; t < tn; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        long i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> g(err_mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace rearr
