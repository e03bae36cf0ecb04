#include "incentive/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "incentive/errors.hpp"
#include "incentive/rng.hpp"

namespace incentive {

PriorModel PriorModel::from_precision(double xi_x) {
  if (!(xi_x > 0.0) || !std::isfinite(xi_x)) {
    throw DomainError("prior precision must be positive and finite, got " +
                      std::to_string(xi_x));
  }
  return PriorModel(xi_x);
}

PriorModel PriorModel::from_variance(double sigma2_x) {
  if (!(sigma2_x > 0.0) || !std::isfinite(sigma2_x)) {
    throw DomainError("prior variance must be positive and finite, got " +
                      std::to_string(sigma2_x));
  }
  return PriorModel(1.0 / sigma2_x);
}

LocalEstimate local_estimate(const PriorModel& prior, const Measurement& m) {
  if (!std::isfinite(m.y)) {
    throw DomainError("measurement of agent " + std::to_string(m.agent_id) +
                      " is not finite");
  }
  if (!(m.xi >= 0.0) || !std::isfinite(m.xi)) {
    throw DomainError("measurement precision must be finite and >= 0");
  }
  const double total = prior.precision() + m.xi;
  return {m.agent_id, (m.xi / total) * m.y, 1.0 / total};
}

GlobalEstimate fuse(const PriorModel& prior,
                    std::span<const LocalEstimate> locals) {
  const double xi_x = prior.precision();
  double precision = xi_x;
  double weighted = 0.0;
  for (const auto& local : locals) {
    if (!(local.sigma_local > 0.0)) {
      throw InvariantError("local MSE of agent " +
                           std::to_string(local.agent_id) +
                           " must be positive");
    }
    const double inv = 1.0 / local.sigma_local;
    // Tolerate the rounding of 1/(1/xi_x) but nothing larger.
    if (inv < xi_x * (1.0 - 1e-12)) {
      throw InvariantError("local MSE of agent " +
                           std::to_string(local.agent_id) +
                           " exceeds the prior variance");
    }
    precision += std::max(0.0, inv - xi_x);
    weighted += inv * local.x_hat;
  }
  const double sigma_g = 1.0 / precision;
  return {sigma_g * weighted, sigma_g};
}

World sample_world(const PriorModel& prior, std::span<const double> efforts,
                   std::uint64_t seed, std::uint64_t trial) {
  World world;
  Substream world_stream(seed, kWorldStream, trial);
  world.x = std::sqrt(prior.variance()) * world_stream.normal();
  world.measurements.reserve(efforts.size());
  for (std::size_t i = 0; i < efforts.size(); ++i) {
    const double xi = efforts[i];
    if (!(xi >= 0.0) || !std::isfinite(xi)) {
      throw DomainError("effort of agent " + std::to_string(i) +
                        " must be finite and >= 0");
    }
    Substream noise(seed, i, trial);
    const double z = noise.normal();
    const double y = xi > 0.0 ? world.x + z / std::sqrt(xi) : world.x;
    world.measurements.push_back({i, y, xi});
  }
  return world;
}

}  // namespace incentive
