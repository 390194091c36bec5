#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace regen {

inline unsigned default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1u : hc;
}

// Runs fn(r) for r in [0, reps) on `threads` workers. Result r lands in slot r,
// so output is independent of scheduling. Work is handed out in fixed chunks.
template <class T, class Fn>
std::vector<T> run_replicates(std::size_t reps, unsigned threads, Fn&& fn) {
  std::vector<T> out(reps);
  if (reps == 0) return out;
  threads = std::max(1u, std::min<unsigned>(threads, unsigned(std::min<std::size_t>(reps, 4096))));
  if (threads == 1) {
    for (std::size_t r = 0; r < reps; ++r) out[r] = fn(r);
    return out;
  }
  constexpr std::size_t chunk = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    try {
      for (;;) {
        const std::size_t lo = next.fetch_add(chunk);
        if (lo >= reps) break;
        const std::size_t hi = std::min(reps, lo + chunk);
        for (std::size_t r = lo; r < hi; ++r) out[r] = fn(r);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lk(err_mu);
      if (!err) err = std::current_exception();
      next.store(reps);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace regen
