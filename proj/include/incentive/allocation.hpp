#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "incentive/effort.hpp"
#include "incentive/estimation.hpp"
#include "incentive/knapsack.hpp"

namespace incentive {

// Pick efforts so that 1 / (xi_x + sum phi_i xi_i) <= sigma_t at least cost.
struct AllocationProblem {
  PriorModel prior;
  std::vector<EffortCostModel> costs;
  double sigma_t = 1.0;

  // Precision the agents must add on top of the prior: 1/sigma_t - xi_x.
  double demand() const;
  // sum of xi_iu.
  double max_precision() const;
  void validate() const;
};

struct AllocationPlan {
  std::vector<std::uint8_t> phi;
  std::vector<double> xi_tilde;
  double total_cost = 0.0;
  // Upper minus lower bound from rounding real weights onto the DP grid.
  // Zero when the knapsack optimum is certified exact.
  double quantization_gap = 0.0;

  std::size_t size() const { return phi.size(); }
  std::size_t selected_count() const;
  double added_precision() const;
  double global_mse(const PriorModel& prior) const;
};

enum class Regime { optimal, suboptimal };
std::string to_string(Regime regime);

struct SolverOptions {
  // Binary knapsack: weights are xi_iu * kp_scale rounded to integers.
  double kp_scale = 1e6;
  // Bounded knapsack precision cell. 0 picks min unit precision / 64, made
  // coarser if needed to stay within bkp_max_cells.
  double bkp_resolution = 0.0;
  std::int64_t bkp_max_cells = std::int64_t{1} << 20;
  std::size_t realizability_grid = kDefaultRealizabilityGrid;
  int descent_starts = 16;
  std::uint64_t descent_seed = 0x6A09E667F3BCC909ULL;
  double feasibility_tolerance = 1e-9;
};

struct Solution {
  AllocationPlan plan;
  Regime regime = Regime::optimal;
};

// Selection reduction: nonzero efforts become selected agents.
AllocationPlan reduce_to_selection(const AllocationProblem& problem,
                                 std::span<const double> xi,
                                 double tolerance = 1e-9);

// Equal split for a fleet sharing one quadratic coefficient, with saturated
// agents clamped at xi_iu and the remainder re-split among the others.
AllocationPlan solve_quadratic(const AllocationProblem& problem);

// Bounded knapsack over reading counts for an all-discrete fleet.
AllocationPlan solve_bkp(const AllocationProblem& problem,
                         const SolverOptions& options = {});

// Every agent either sits out or works at xi_iu.
AllocationPlan solve_binary_kp(const AllocationProblem& problem,
                               const SolverOptions& options = {});

// Multi-start projected gradient descent on sum c_i(xi_i) over
// {sum xi_i = demand, 0 <= xi_i <= xi_iu}, followed by the selection reduction.
AllocationPlan solve_continuous(const AllocationProblem& problem,
                                const SolverOptions& options = {});

// Optimal regime when every cost passes the realizability check, otherwise
// the binary knapsack fallback.
Solution solve(const AllocationProblem& problem,
               const SolverOptions& options = {});

bool all_realizable(const AllocationProblem& problem,
                    const SolverOptions& options = {});

// Cost of a plan entry: exact lattice cost for discrete models on their
// lattice, the continuous cost otherwise.
double plan_cost(const EffortCostModel& model, double xi);

// Knapsack tables built once for the largest demand of a sweep and queried
// per threshold. Both throw InfeasibleError from plan_for() when the fleet
// cannot reach the threshold.
class BoundedKnapsackTable {
 public:
  BoundedKnapsackTable(PriorModel prior, std::vector<EffortCostModel> costs,
                       double max_demand, const SolverOptions& options = {});
  AllocationPlan plan_for(double sigma_t) const;
  double resolution() const { return resolution_; }

 private:
  AllocationPlan plan_for_cells(std::int64_t cells) const;

  PriorModel prior_;
  std::vector<EffortCostModel> costs_;
  double resolution_ = 0.0;
  std::unique_ptr<CoveringKnapsack> table_;
  std::unique_ptr<CoveringKnapsack> optimistic_;
  double tolerance_;
};

class BinaryKnapsackTable {
 public:
  BinaryKnapsackTable(PriorModel prior, std::vector<EffortCostModel> costs,
                      double max_demand, const SolverOptions& options = {});
  AllocationPlan plan_for(double sigma_t) const;

 private:
  PriorModel prior_;
  std::vector<EffortCostModel> costs_;
  double scale_;
  std::unique_ptr<CoveringKnapsack> table_;
  std::unique_ptr<CoveringKnapsack> optimistic_;
  double tolerance_;
};

}  // namespace incentive
