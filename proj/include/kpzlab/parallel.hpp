/*
 * Replica-indexed parallel loop.  Workers pull indices from an atomic
 * counter; results land in slot i so the merge order never depends on
 * scheduling.
 */
#ifndef KPZLAB_PARALLEL_HPP
#define KPZLAB_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kpzlab {

inline int default_workers() {
  unsigned h = std::thread::hardware_concurrency();
  return h ? static_cast<int>(h) : 1;
}

// calls f(i) for i in [0, n); rethrows the first exception after joining
template <class F>
void parallel_for(long n, int workers, F&& f) {
  if (workers < 1) workers = 1;
  workers = static_cast<int>(std::min<long>(workers, std::max(1L, n)));
  if (workers == 1) {
    for (long i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<long> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr err;
  std::mutex mu;
  auto body = [&] {
    for (;;) {
      long i = next.fetch_add(1);
      if (i >= n || stop.load()) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err) err = std::current_exception();
        stop = true;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

template <class T, class F>
std::vector<T> parallel_map(long n, int workers, F&& f) {
  std::vector<T> out(static_cast<std::size_t>(std::max(0L, n)));
  parallel_for(n, workers, [&](long i) { out[static_cast<std::size_t>(i)] = f(i); });
  return out;
}

}  // namespace kpzlab

#endif
