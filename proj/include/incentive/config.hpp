#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "incentive/allocation.hpp"
#include "incentive/effort.hpp"
#include "incentive/game.hpp"
#include "incentive/mechanism.hpp"
#include "incentive/population.hpp"

namespace incentive {

enum class SweepMode { automatic, optimal, suboptimal, paired };
enum class SolverChoice { automatic, quadratic, bkp, binary, continuous };

// Parsed experiment file. Sections and keys:
//
//   [experiment]  sigma2_x | xi_x, seed, trials, jobs
//   [population]  agents, eta_max, cost_floor, precision_min, precision_max
//   [agents]      0 = <cost spec>, 1 = <cost spec>, ...  (overrides population)
//   [problem]     sigma_t
//   [sweep]       sigma_t = a, b, c  |  sigma_t_min, sigma_t_max, points,
//                 spacing = log|linear ; regime = auto|optimal|suboptimal|paired
//                 verify = true|false
//   [solver]      method, kp_scale, bkp_resolution, bkp_max_cells,
//                 realizability_grid, descent_starts
//   [mechanism]   slack, honest_xi
//   [verify]      effort_points, z
//   [profile]     <i> = xi=<v> estimate=<policy> measurement=<policy>
//
// Cost specs: "quadratic l=<l> xi_u=<u>", "discrete sigma2_o=<s> c_o=<c>
// eta_max=<m>", "tabulated xi=0;..;u c=0;..;c_u [smoothing=<w>]" or
// "tabulated shape=sqrt|saturating|power a=<a> [k=<k>] [p=<p>] xi_u=<u>
// nodes=<n>". Policies: truthful, affine:<a>:<b>, constant:<v>.
struct ExperimentConfig {
  double sigma2_x = 1000.0;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 0;
  int jobs = 1;

  std::optional<PopulationSpec> population;
  int eta_max = 2;
  std::vector<EffortCostModel> agents;

  std::optional<double> sigma_t;
  std::vector<double> sweep_sigma_t;
  SweepMode mode = SweepMode::automatic;
  bool verify = false;

  SolverChoice method = SolverChoice::automatic;
  SolverOptions solver;
  MechanismOptions mechanism;
  DeviationGrid grid;
  std::map<std::size_t, AgentStrategy> profile_overrides;

  // Fleet from [agents] or generated from [population].
  std::vector<EffortCostModel> fleet() const;
  PriorModel prior() const { return PriorModel::from_variance(sigma2_x); }
  std::uint64_t require_seed() const;
  // Canonical key=value snapshot used in run records.
  std::string snapshot() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

EffortCostModel parse_cost_spec(std::string_view spec);
ReportPolicy parse_policy(std::string_view spec);

}  // namespace incentive
