#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "incentive/allocation.hpp"
#include "incentive/effort.hpp"
#include "incentive/estimation.hpp"

namespace incentive {

enum class MechanismKind { m1, m2 };
std::string to_string(MechanismKind kind);

// Peer value meaning "compare against the honest agent's measurement".
inline constexpr std::size_t kHonestPeer = static_cast<std::size_t>(-1);

struct PaymentEntry {
  bool selected = false;
  double beta = 0.0;
  double gamma = 0.0;
  std::size_t peer = 0;
  double xi_target = 0.0;
};

// p_i = gamma_i - beta_i (x_hat_ri - y_r,peer)^2 for selected agents, 0 for
// everyone else. Immutable once calibrated.
struct PaymentRule {
  MechanismKind kind = MechanismKind::m1;
  double prior_precision = 1.0;
  std::optional<double> honest_xi;
  std::vector<PaymentEntry> entries;

  std::size_t size() const { return entries.size(); }
  // Payment given agent i's reported estimate and its peer's reported
  // measurement.
  double pay(std::size_t i, double x_hat_r, double y_r_peer) const;
};

struct AgentReport {
  double x_hat_r = 0.0;
  double y_r = 0.0;
};

struct ReportProfile {
  std::vector<AgentReport> agents;
  // Measurement of the honest agent, when the rule uses one.
  std::optional<double> honest_y;
};

double payment(const PaymentRule& rule, const ReportProfile& reports,
               std::size_t i);

// Selected agents form one cycle in index order: each is paired with the
// next selected index, wrapping around. Unselected agents get no peer.
// With an honest agent every selected agent is paired with it instead.
std::vector<std::size_t> cycle_pairing(const AllocationPlan& plan,
                                       bool use_honest_agent = false);

struct MechanismOptions {
  // Honest-agent precision; when set every selected agent is scored against
  // the honest measurement.
  std::optional<double> honest_xi;
  // Multiplier realising the strict inequality on beta in the fallback rule.
  double slack = 1.05;
  std::size_t grid_points = kDefaultRealizabilityGrid;
};

// Optimal-regime rule: beta_i = c_i'(xi_i) (xi_x + xi_i)^2 and
// gamma_i = beta_i (1/(xi_x + xi_i) + 1/xi_j) + c_i(xi_i).
PaymentRule calibrate_m1(const PriorModel& prior,
                         std::span<const EffortCostModel> costs,
                         const AllocationPlan& plan,
                         std::span<const std::size_t> pairing,
                         const MechanismOptions& options = {});
PaymentRule calibrate_m1(const PriorModel& prior,
                         std::span<const EffortCostModel> costs,
                         const AllocationPlan& plan,
                         const MechanismOptions& options = {});

// Fallback rule for selected agents at maximum effort:
// beta_i = slack * max_xi c_i'(xi) (xi_x + xi)^2 over the effort grid and
// gamma_i = beta_i (1/(xi_x + xi_iu) + 1/xi_ju) + c_i(xi_iu).
PaymentRule calibrate_m2(const PriorModel& prior,
                         std::span<const EffortCostModel> costs,
                         const AllocationPlan& plan,
                         std::span<const std::size_t> pairing,
                         const MechanismOptions& options = {});
PaymentRule calibrate_m2(const PriorModel& prior,
                         std::span<const EffortCostModel> costs,
                         const AllocationPlan& plan,
                         const MechanismOptions& options = {});

// E[(x_hat_i - y_j)^2] = 1/(xi_i + xi_x) + 1/xi_j.
double expected_peer_gap(const PriorModel& prior, double xi_i, double xi_j);

// Text form of a rule, exact to the last bit:
//
//   payment-rule v1
//   mechanism M1|M2
//   prior_precision <xi_x>
//   honest_xi <xi_h>|none
//   agents <n>
//   agent <i> selected <0|1> peer <j|honest|none> xi <xi> beta <b> gamma <g>
std::string dump_rule(const PaymentRule& rule);
PaymentRule parse_rule(std::string_view text);

}  // namespace incentive
