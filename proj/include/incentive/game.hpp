#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "incentive/allocation.hpp"
#include "incentive/effort.hpp"
#include "incentive/estimation.hpp"
#include "incentive/mechanism.hpp"
#include "incentive/stats.hpp"

namespace incentive {

// Map from a private value to the value an agent reports.
struct ReportPolicy {
  enum class Kind { truthful, affine, constant };
  Kind kind = Kind::truthful;
  double a = 1.0;
  double b = 0.0;

  static ReportPolicy truthful() { return {}; }
  static ReportPolicy affine(double a, double b) { return {Kind::affine, a, b}; }
  static ReportPolicy constant(double v) { return {Kind::constant, 0.0, v}; }

  double apply(double value) const {
    switch (kind) {
      case Kind::truthful:
        return value;
      case Kind::affine:
        return a * value + b;
      case Kind::constant:
        return b;
    }
    return value;
  }
  std::string name() const;
};

// truthful, affine(a, b) for a in {0.5, 1, 2} and b in {-1, 0, 1} without the
// identity map, and constant(0): ten policies.
std::vector<ReportPolicy> default_report_policies();

struct AgentStrategy {
  double xi = 0.0;
  ReportPolicy estimate;
  ReportPolicy measurement;
};

using StrategyProfile = std::vector<AgentStrategy>;

// Truthful reports at each entry's target effort; unselected agents rest.
StrategyProfile equilibrium_profile(const PaymentRule& rule);

struct Game {
  PriorModel prior;
  std::vector<EffortCostModel> costs;
  PaymentRule rule;
};

struct MonteCarloOptions {
  std::size_t trials = 200000;
  std::uint64_t seed = 1;
  int jobs = 0;
};

struct AgentOutcome {
  Estimate payment;
  Estimate utility;
};

// Monte Carlo payment and utility (payment minus effort cost) of one agent.
// Trial t always sees the same X, noise and honest draws for a given seed.
AgentOutcome simulate_agent(const Game& game, const StrategyProfile& profile,
                            std::size_t agent, const MonteCarloOptions& mc);

Estimate expected_utility(const Game& game, const StrategyProfile& profile,
                          std::size_t agent, const MonteCarloOptions& mc);

struct DeviationGrid {
  std::size_t effort_points = 41;
  std::vector<ReportPolicy> policies = default_report_policies();
  double z = 3.0;
};

enum class Verdict { no_profitable_deviation, profitable_deviation_found };
std::string to_string(Verdict verdict);

struct DeviationReport {
  std::size_t agent = 0;
  double best_found_gain = 0.0;
  double standard_error = 0.0;
  Verdict verdict = Verdict::no_profitable_deviation;
  double best_xi = 0.0;
  ReportPolicy best_policy;
};

// Holds everyone else at the candidate and scans agent i over the effort
// grid times the estimate-report policies. Gains are paired differences
// against the candidate on identical worlds.
std::vector<DeviationReport> verify_equilibrium(const Game& game,
                                                const StrategyProfile& candidate,
                                                const DeviationGrid& grid,
                                                const MonteCarloOptions& mc);

// Same scan against each adversarial profile of the other agents. Requires a
// rule that scores agents against an honest agent. Returns one flag per agent:
// true when the candidate strategy survives every opponent profile.
std::vector<bool> verify_dominance(
    const Game& game, const StrategyProfile& candidate,
    std::span<const StrategyProfile> adversarial, const DeviationGrid& grid,
    const MonteCarloOptions& mc);

// Empirical MSE of the fused estimate when agents follow `profile` and the
// estimator weights reports by the plan's precisions.
Estimate realized_global_error(const StrategyProfile& profile,
                               const AllocationPlan& plan,
                               const PriorModel& prior,
                               const MonteCarloOptions& mc);

}  // namespace incentive
