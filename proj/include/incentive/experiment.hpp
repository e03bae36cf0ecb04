#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "incentive/allocation.hpp"
#include "incentive/config.hpp"
#include "incentive/game.hpp"
#include "incentive/mechanism.hpp"
#include "incentive/stats.hpp"

namespace incentive {

struct SweepRow {
  double sigma_t = 0.0;
  Regime regime = Regime::optimal;
  bool feasible = true;
  double total_payment = 0.0;
  std::size_t selected = 0;
  std::optional<Estimate> empirical_mse;
  // infeasible | unpaired | skipped | no_profitable_deviation |
  // profitable_deviation_found
  std::string verdict = "skipped";
  std::optional<PaymentRule> rule;
  AllocationPlan plan;
  std::vector<DeviationReport> deviations;
};

struct RunRecord {
  std::string config_snapshot;
  std::vector<SweepRow> rows;

  bool any_profitable_deviation() const;
};

Solution solve_with(const AllocationProblem& problem, SolverChoice choice,
                    const SolverOptions& options = {});

// Plans, calibrates and optionally verifies every threshold of the sweep.
// Rows run in parallel; all randomness derives from (seed, row, trial).
RunRecord run_sweep(const ExperimentConfig& config);

// sigma_t,regime,total_payment,selected,empirical_mse,verdict
std::string to_csv(const RunRecord& record);

// Concatenated rule dumps, one block per calibrated row:
//
//   row <k> sigma_t <v> regime <optimal|suboptimal>
//   <payment-rule v1 block>
std::string dump_rules(const RunRecord& record);

struct RuleBlock {
  std::size_t row = 0;
  double sigma_t = 0.0;
  Regime regime = Regime::optimal;
  PaymentRule rule;
};
std::vector<RuleBlock> parse_rules(std::string_view text);

// Plan implied by a rule: selected entries at their target efforts.
AllocationPlan plan_from_rule(const PaymentRule& rule,
                              std::span<const EffortCostModel> costs);

std::string format_number(double value);

}  // namespace incentive
