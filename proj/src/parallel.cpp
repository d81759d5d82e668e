#include "contagion/parallel.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace contagion {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int workers) {
  if (n == 0) return;
  std::size_t nw = workers > 0
                       ? static_cast<std::size_t>(workers)
                       : std::max(1u, std::thread::hardware_concurrency());
  nw = std::min(nw, n);
  if (nw <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto run = [&] {
    // Chunked self-scheduling: assignment order does not matter because
    // every item writes only to its own slot.
    const std::size_t chunk = std::max<std::size_t>(1, n / (nw * 8));
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t start = next.fetch_add(chunk);
      if (start >= n) break;
      const std::size_t end = std::min(n, start + chunk);
      try {
        for (std::size_t i = start; i < end; ++i) fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        break;
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) threads.emplace_back(run);
  for (auto& t : threads) t.join();
  if (failed && error) std::rethrow_exception(error);
}

}  // namespace contagion
