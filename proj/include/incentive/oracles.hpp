#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "incentive/allocation.hpp"
#include "incentive/estimation.hpp"
#include "incentive/mechanism.hpp"

// Brute-force reference implementations for small instances. They share no
// code paths with the solvers they check.
namespace incentive::oracles {

struct BruteForceResult {
  double cost = 0.0;
  bool feasible = false;
  std::vector<int> counts;  // readings per agent, or 0/1 selections
};

// All 2^N subsets of agents at (xi_iu, c(xi_iu)).
BruteForceResult binary_knapsack(const AllocationProblem& problem);

// All prod(eta_max_i + 1) count vectors of an all-discrete fleet.
BruteForceResult bounded_knapsack(const AllocationProblem& problem);

// Separable minimum of sum c_i(xi_i) over sum xi_i >= demand with each xi_i on
// a uniform grid of `points` levels in [0, xi_iu]; min-plus DP over agents.
struct GridOptimum {
  double cost = 0.0;
  std::vector<double> xi;
};
GridOptimum separable_grid_minimum(const AllocationProblem& problem,
                                   std::size_t points);

// Selection check on a shared effort grid per agent: the joint search over
// selection flags and efforts versus the effort-only search.
struct SelectionCheck {
  double joint = 0.0;
  double effort_only = 0.0;
  bool feasible = false;
};
SelectionCheck selection_brute_force(const AllocationProblem& problem,
                                 std::size_t levels);

// Posterior mean and variance of X by trapezoid integration on a grid of
// `points` nodes spanning +-width prior standard deviations.
struct GridPosterior {
  double mean = 0.0;
  double variance = 0.0;
};
GridPosterior posterior_by_grid(const PriorModel& prior,
                                std::span<const Measurement> measurements,
                                std::size_t points = 200001,
                                double width = 12.0);

// Expected utility of agent i under truthful play when it exerts xi and its
// peer sits at the rule's target, from the Gaussian moments.
double truthful_utility(const PaymentRule& rule, const PriorModel& prior,
                        std::span<const EffortCostModel> costs, std::size_t i,
                        double xi);

// Effort maximising truthful_utility over a dense grid on [0, xi_iu],
// refined by golden-section search around the best node.
double best_response_effort(const PaymentRule& rule, const PriorModel& prior,
                            std::span<const EffortCostModel> costs,
                            std::size_t i, std::size_t points = 4001);

}  // namespace incentive::oracles
