#pragma once
#include <atomic>
#include <exception>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace kdvlab {

/** Runs fn(i) for i in [0, n_jobs) on up to n_threads workers.  Jobs must be
 * pure relative to shared state and write only their own result slot, which
 * is what makes output independent of the parallelism degree.  The first
 * exception (by job index) is rethrown after all workers join.
 */
inline void run_parallel(int n_jobs, int n_threads, const std::function<void(int)>& fn) {
  if (n_jobs <= 0) return;
  if (n_threads < 1) throw std::invalid_argument("run_parallel: n_threads must be >= 1");
  if (n_threads == 1) {
    for (int i = 0; i < n_jobs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n_jobs));
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n_jobs) return;
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<size_t>(i)] = std::current_exception();
      }
    }
  };
  int spawn = std::min(n_threads, n_jobs);
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(spawn));
  for (int t = 0; t < spawn; ++t) threads.emplace_back(worker);
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace kdvlab
