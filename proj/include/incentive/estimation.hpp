#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace incentive {

// Zero-mean Gaussian prior on the scalar X. Only the precision is stored;
// the variance is derived from it.
class PriorModel {
 public:
  static PriorModel from_precision(double xi_x);
  static PriorModel from_variance(double sigma2_x);

  double precision() const { return xi_x_; }
  double variance() const { return 1.0 / xi_x_; }

 private:
  explicit PriorModel(double xi_x) : xi_x_(xi_x) {}
  double xi_x_;
};

// y = x + v with v ~ N(0, 1/xi). xi == 0 marks an uninformative reading.
struct Measurement {
  std::size_t agent_id = 0;
  double y = 0.0;
  double xi = 0.0;

  bool informative() const { return xi > 0.0; }
};

struct LocalEstimate {
  std::size_t agent_id = 0;
  double x_hat = 0.0;
  double sigma_local = 0.0;  // local MSE, 1 / (xi_x + xi)
};

struct GlobalEstimate {
  double x_hat_g = 0.0;
  double sigma_g = 0.0;
};

// Posterior mean and variance of X given one measurement. Computed in
// precision form so xi == 0 returns the prior.
LocalEstimate local_estimate(const PriorModel& prior, const Measurement& m);

// Combines local posteriors into the global MMSE estimate. Each agent's
// measurement precision is recovered as 1/Sigma_i - xi_x.
GlobalEstimate fuse(const PriorModel& prior,
                    std::span<const LocalEstimate> locals);

struct World {
  double x = 0.0;
  std::vector<Measurement> measurements;
};

// One draw of the generative model. Agent i's noise comes from its own
// substream keyed by (seed, i, trial), so efforts of other agents never
// change it.
World sample_world(const PriorModel& prior, std::span<const double> efforts,
                   std::uint64_t seed, std::uint64_t trial = 0);

}  // namespace incentive
