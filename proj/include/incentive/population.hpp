#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "incentive/effort.hpp"

namespace incentive {

// Synthetic crowd: maximum precision uniform on [precision_min,
// precision_max] and maximum cost from an equal mixture of two Gaussians.
struct PopulationSpec {
  std::size_t agents = 100;
  double precision_min = 1e-4;
  double precision_max = 1e-2;
  double cost_mean_low = 50.0;
  double cost_mean_high = 100.0;
  double cost_variance = 100.0;
  // Mixture draws below this are clipped up to it.
  double cost_floor = 1.0;
};

struct AgentDraw {
  double xi_u = 0.0;  // 1 / sigma2_il
  double c_u = 0.0;
};

struct Population {
  std::vector<AgentDraw> draws;
  std::size_t clipped = 0;

  // Discrete fleet with eta_max readings reaching (xi_u, c_u):
  // sigma2_o = eta_max / xi_u and c_o = c_u / eta_max.
  std::vector<EffortCostModel> fleet(int eta_max) const;
};

Population draw_population(const PopulationSpec& spec, std::uint64_t seed);

std::vector<EffortCostModel> generate_population(std::size_t agents,
                                                 int eta_max,
                                                 std::uint64_t seed);

}  // namespace incentive
