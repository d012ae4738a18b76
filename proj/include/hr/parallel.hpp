#pragma once
// Deterministic work sharing: tasks are striped over threads by index, each
// task writes only its own slot, so results are identical for any thread
// count (including 1).

#include <exception>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace hr {

template <typename Fn>
void parallel_for_indexed(std::size_t n, int threads, Fn&& fn) {
  if (threads < 1) throw std::invalid_argument("parallel_for_indexed: threads must be >= 1");
  if (n == 0) return;
  const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (nt == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  std::vector<std::exception_ptr> errors(nt);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t tid = 0; tid < nt; ++tid) {
    pool.emplace_back([&, tid]() {
      try {
        for (std::size_t i = tid; i < n; i += nt) fn(i, tid);
      } catch (...) {
        errors[tid] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace hr
