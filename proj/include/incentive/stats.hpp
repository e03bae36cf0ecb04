#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace incentive {

// Mean and standard error of a Monte Carlo average.
struct Estimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};

// Welford accumulator; merge() is Chan's parallel update so block partials
// can be combined in a fixed order.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningStats& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(n_ + other.n_);
    const double delta = other.mean_ - mean_;
    mean_ += delta * static_cast<double>(other.n_) / total;
    m2_ += other.m2_ + delta * delta * static_cast<double>(n_) *
                           static_cast<double>(other.n_) / total;
    n_ += other.n_;
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  Estimate estimate() const {
    return {mean_, n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0,
            n_};
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Trials are cut into fixed-size blocks. Each block is evaluated by exactly
// one worker and the caller merges block results in block order, so the
// outcome does not depend on the number of workers.
inline constexpr std::size_t kTrialBlock = 4096;

std::size_t block_count(std::size_t trials);

// Runs body(block_index, first_trial, end_trial) for every block on up to
// `jobs` threads (jobs <= 0 means hardware concurrency).
void for_each_block(std::size_t trials, int jobs,
                    const std::function<void(std::size_t, std::size_t,
                                             std::size_t)>& body);

// Generic parallel loop over [0, n).
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& body);

}  // namespace incentive
