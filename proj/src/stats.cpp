#include "incentive/stats.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace incentive {

std::size_t block_count(std::size_t trials) {
  return (trials + kTrialBlock - 1) / kTrialBlock;
}

void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  std::size_t workers =
      jobs > 0 ? static_cast<std::size_t>(jobs)
               : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void for_each_block(std::size_t trials, int jobs,
                    const std::function<void(std::size_t, std::size_t,
                                             std::size_t)>& body) {
  parallel_for(block_count(trials), jobs, [&](std::size_t b) {
    const std::size_t first = b * kTrialBlock;
    body(b, first, std::min(trials, first + kTrialBlock));
  });
}

}  // namespace incentive
