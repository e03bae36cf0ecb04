#include "incentive/population.hpp"

#include <cmath>

#include "incentive/errors.hpp"
#include "incentive/rng.hpp"

namespace incentive {
namespace {
constexpr std::uint64_t kPopulationTrial = 0xC0FFEE;
}

std::vector<EffortCostModel> Population::fleet(int eta_max) const {
  std::vector<EffortCostModel> models;
  models.reserve(draws.size());
  for (const auto& d : draws) {
    models.push_back(EffortCostModel::discrete_linear(
        eta_max / d.xi_u, d.c_u / eta_max, eta_max));
  }
  return models;
}

Population draw_population(const PopulationSpec& spec, std::uint64_t seed) {
  if (spec.agents == 0) throw ConfigError("population needs >= 1 agent");
  if (!(spec.precision_min > 0.0) ||
      !(spec.precision_max > spec.precision_min)) {
    throw ConfigError("population precision range must be 0 < min < max");
  }
  if (!(spec.cost_floor > 0.0)) throw ConfigError("cost floor must be > 0");
  Population population;
  population.draws.reserve(spec.agents);
  const double sd = std::sqrt(spec.cost_variance);
  for (std::size_t i = 0; i < spec.agents; ++i) {
    Substream rng(seed, i, kPopulationTrial);
    AgentDraw d;
    d.xi_u = spec.precision_min +
             (spec.precision_max - spec.precision_min) * rng.uniform();
    const double mean =
        rng.uniform() < 0.5 ? spec.cost_mean_low : spec.cost_mean_high;
    d.c_u = mean + sd * rng.normal();
    if (d.c_u < spec.cost_floor) {
      d.c_u = spec.cost_floor;
      ++population.clipped;
    }
    population.draws.push_back(d);
  }
  return population;
}

std::vector<EffortCostModel> generate_population(std::size_t agents,
                                                 int eta_max,
                                                 std::uint64_t seed) {
  PopulationSpec spec;
  spec.agents = agents;
  return draw_population(spec, seed).fleet(eta_max);
}

}  // namespace incentive
