#include "incentive/game.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "incentive/errors.hpp"
#include "incentive/rng.hpp"

namespace incentive {
namespace {

// Shared draws of trial t.
struct TrialNoise {
  double x;
  double honest_z;
};

TrialNoise draw_common(const PriorModel& prior, std::uint64_t seed,
                       std::uint64_t trial, bool need_honest) {
  TrialNoise n{};
  Substream world(seed, kWorldStream, trial);
  n.x = std::sqrt(prior.variance()) * world.normal();
  if (need_honest) {
    Substream honest(seed, kHonestStream, trial);
    n.honest_z = honest.normal();
  }
  return n;
}

double agent_z(std::uint64_t seed, std::size_t agent, std::uint64_t trial) {
  Substream noise(seed, agent, trial);
  return noise.normal();
}

double shrink(double xi_x, double xi) { return xi / (xi_x + xi); }

// Reported measurement of a strategic agent. Without effort there is no
// reading, so the report is the policy applied to the prior mean.
double reported_measurement(const AgentStrategy& s, double x, double z) {
  if (!(s.xi > 0.0)) return s.measurement.apply(0.0);
  return s.measurement.apply(x + z / std::sqrt(s.xi));
}

double local_estimate_value(double xi_x, double xi, double x, double z) {
  if (!(xi > 0.0)) return 0.0;
  return shrink(xi_x, xi) * (x + z * (1.0 / std::sqrt(xi)));
}

// Peer measurement seen by agent i's payment in trial t.
double peer_report(const Game& game, const StrategyProfile& profile,
                   std::size_t i, const TrialNoise& common, std::uint64_t seed,
                   std::uint64_t trial) {
  const auto& e = game.rule.entries[i];
  if (e.peer == kHonestPeer) {
    return common.x + common.honest_z / std::sqrt(*game.rule.honest_xi);
  }
  return reported_measurement(profile[e.peer], common.x,
                              agent_z(seed, e.peer, trial));
}

void check_game(const Game& game, const StrategyProfile& profile) {
  if (game.costs.size() != game.rule.size() ||
      profile.size() != game.rule.size()) {
    throw InvariantError("game, rule and profile sizes differ");
  }
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double xi = profile[i].xi;
    if (!(xi >= 0.0) || xi > game.costs[i].xi_u() * (1.0 + 1e-9)) {
      throw DomainError("strategy effort of agent " + std::to_string(i) +
                        " outside [0, xi_iu]");
    }
  }
  for (const auto& e : game.rule.entries) {
    if (e.selected && e.peer == kHonestPeer && !game.rule.honest_xi) {
      throw InvariantError("rule references an unconfigured honest agent");
    }
  }
}

struct CellScan {
  std::vector<double> efforts;
  std::vector<ReportPolicy> policies;
  std::vector<RunningStats> cells;  // efforts.size() x policies.size()
};

// Paired utility differences (cell - candidate) for agent i.
CellScan scan_agent(const Game& game, const StrategyProfile& profile,
                    std::size_t i, const DeviationGrid& grid,
                    const MonteCarloOptions& mc) {
  CellScan scan;
  scan.efforts = effort_grid(game.costs[i].xi_u(), grid.effort_points);
  scan.policies = grid.policies;
  const std::size_t ne = scan.efforts.size();
  const std::size_t np = scan.policies.size();
  const std::size_t cells = ne * np;

  const double xi_x = game.prior.precision();
  const auto& entry = game.rule.entries[i];
  const auto& own = profile[i];
  const double own_cost = game.costs[i].envelope_cost(own.xi);
  std::vector<double> cell_cost(ne), cell_shrink(ne), cell_scale(ne);
  for (std::size_t k = 0; k < ne; ++k) {
    const double xi = scan.efforts[k];
    cell_cost[k] = game.costs[i].envelope_cost(xi);
    cell_shrink[k] = shrink(xi_x, xi);
    cell_scale[k] = xi > 0.0 ? 1.0 / std::sqrt(xi) : 0.0;
  }
  const bool need_honest = entry.selected && entry.peer == kHonestPeer;

  const std::size_t blocks = block_count(mc.trials);
  std::vector<std::vector<RunningStats>> partial(blocks);
  for_each_block(mc.trials, mc.jobs,
                 [&](std::size_t b, std::size_t first, std::size_t last) {
    auto& stats = partial[b];
    stats.assign(cells, RunningStats{});
    for (std::size_t t = first; t < last; ++t) {
      const TrialNoise common = draw_common(game.prior, mc.seed, t, need_honest);
      const double z = agent_z(mc.seed, i, t);
      double peer_y = 0.0;
      if (entry.selected) {
        peer_y = peer_report(game, profile, i, common, mc.seed, t);
      }
      const double base =
          game.rule.pay(i,
                        own.estimate.apply(
                            local_estimate_value(xi_x, own.xi, common.x, z)),
                        peer_y) -
          own_cost;
      for (std::size_t k = 0; k < ne; ++k) {
        const double x_hat =
            cell_scale[k] > 0.0 ? cell_shrink[k] * (common.x + z * cell_scale[k])
                                : 0.0;
        for (std::size_t p = 0; p < np; ++p) {
          const double u =
              game.rule.pay(i, scan.policies[p].apply(x_hat), peer_y) -
              cell_cost[k];
          stats[k * np + p].add(u - base);
        }
      }
    }
  });

  scan.cells.assign(cells, RunningStats{});
  for (const auto& block : partial) {
    for (std::size_t c = 0; c < cells; ++c) scan.cells[c].merge(block[c]);
  }
  return scan;
}

DeviationReport summarize(std::size_t agent, const CellScan& scan, double z) {
  DeviationReport report;
  report.agent = agent;
  report.best_found_gain = -std::numeric_limits<double>::infinity();
  const std::size_t np = scan.policies.size();
  for (std::size_t c = 0; c < scan.cells.size(); ++c) {
    const Estimate e = scan.cells[c].estimate();
    if (e.mean > report.best_found_gain) {
      report.best_found_gain = e.mean;
      report.standard_error = e.standard_error;
      report.best_xi = scan.efforts[c / np];
      report.best_policy = scan.policies[c % np];
    }
  }
  report.verdict = report.best_found_gain <= z * report.standard_error
                       ? Verdict::no_profitable_deviation
                       : Verdict::profitable_deviation_found;
  return report;
}

}  // namespace

std::string ReportPolicy::name() const {
  char buffer[64];
  switch (kind) {
    case Kind::truthful:
      return "truthful";
    case Kind::affine:
      std::snprintf(buffer, sizeof buffer, "affine(%g,%g)", a, b);
      return buffer;
    case Kind::constant:
      std::snprintf(buffer, sizeof buffer, "constant(%g)", b);
      return buffer;
  }
  return "unknown";
}

std::vector<ReportPolicy> default_report_policies() {
  std::vector<ReportPolicy> policies{ReportPolicy::truthful()};
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {-1.0, 0.0, 1.0}) {
      if (a == 1.0 && b == 0.0) continue;
      policies.push_back(ReportPolicy::affine(a, b));
    }
  }
  policies.push_back(ReportPolicy::constant(0.0));
  return policies;
}

StrategyProfile equilibrium_profile(const PaymentRule& rule) {
  StrategyProfile profile(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    if (rule.entries[i].selected) profile[i].xi = rule.entries[i].xi_target;
  }
  return profile;
}

std::string to_string(Verdict verdict) {
  return verdict == Verdict::no_profitable_deviation
             ? "no_profitable_deviation"
             : "profitable_deviation_found";
}

AgentOutcome simulate_agent(const Game& game, const StrategyProfile& profile,
                            std::size_t agent, const MonteCarloOptions& mc) {
  check_game(game, profile);
  if (mc.trials == 0) throw DomainError("need at least one trial");
  const auto& entry = game.rule.entries.at(agent);
  const auto& own = profile[agent];
  const double xi_x = game.prior.precision();
  const double cost = game.costs[agent].envelope_cost(own.xi);
  const bool need_honest = entry.selected && entry.peer == kHonestPeer;

  const std::size_t blocks = block_count(mc.trials);
  std::vector<RunningStats> partial(blocks);
  for_each_block(mc.trials, mc.jobs,
                 [&](std::size_t b, std::size_t first, std::size_t last) {
    RunningStats stats;
    for (std::size_t t = first; t < last; ++t) {
      const TrialNoise common = draw_common(game.prior, mc.seed, t, need_honest);
      const double z = agent_z(mc.seed, agent, t);
      double p = 0.0;
      if (entry.selected) {
        const double x_hat_r = own.estimate.apply(
            local_estimate_value(xi_x, own.xi, common.x, z));
        p = game.rule.pay(agent, x_hat_r,
                          peer_report(game, profile, agent, common, mc.seed, t));
      }
      stats.add(p);
    }
    partial[b] = stats;
  });
  RunningStats total;
  for (const auto& s : partial) total.merge(s);
  AgentOutcome outcome;
  outcome.payment = total.estimate();
  outcome.utility = outcome.payment;
  outcome.utility.mean -= cost;
  return outcome;
}

Estimate expected_utility(const Game& game, const StrategyProfile& profile,
                          std::size_t agent, const MonteCarloOptions& mc) {
  return simulate_agent(game, profile, agent, mc).utility;
}

std::vector<DeviationReport> verify_equilibrium(const Game& game,
                                                const StrategyProfile& candidate,
                                                const DeviationGrid& grid,
                                                const MonteCarloOptions& mc) {
  check_game(game, candidate);
  std::vector<DeviationReport> reports;
  reports.reserve(candidate.size());
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    reports.push_back(summarize(i, scan_agent(game, candidate, i, grid, mc),
                                grid.z));
  }
  return reports;
}

std::vector<bool> verify_dominance(const Game& game,
                                   const StrategyProfile& candidate,
                                   std::span<const StrategyProfile> adversarial,
                                   const DeviationGrid& grid,
                                   const MonteCarloOptions& mc) {
  if (!game.rule.honest_xi) {
    throw ConfigError(
        "dominance is only claimed for rules scored against an honest agent");
  }
  check_game(game, candidate);
  std::vector<bool> dominant(candidate.size(), true);
  for (const auto& opponents : adversarial) {
    if (opponents.size() != candidate.size()) {
      throw InvariantError("adversarial profile size differs from candidate");
    }
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      StrategyProfile profile = opponents;
      profile[i] = candidate[i];
      check_game(game, profile);
      const auto report =
          summarize(i, scan_agent(game, profile, i, grid, mc), grid.z);
      if (report.verdict == Verdict::profitable_deviation_found) {
        dominant[i] = false;
      }
    }
  }
  return dominant;
}

Estimate realized_global_error(const StrategyProfile& profile,
                               const AllocationPlan& plan,
                               const PriorModel& prior,
                               const MonteCarloOptions& mc) {
  if (profile.size() != plan.size()) {
    throw InvariantError("profile and plan sizes differ");
  }
  if (mc.trials == 0) throw DomainError("need at least one trial");
  const double xi_x = prior.precision();
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (plan.phi[i] && plan.xi_tilde[i] > 0.0) active.push_back(i);
  }

  const std::size_t blocks = block_count(mc.trials);
  std::vector<RunningStats> partial(blocks);
  for_each_block(mc.trials, mc.jobs,
                 [&](std::size_t b, std::size_t first, std::size_t last) {
    RunningStats stats;
    std::vector<LocalEstimate> locals(active.size());
    for (std::size_t t = first; t < last; ++t) {
      const TrialNoise common = draw_common(prior, mc.seed, t, false);
      for (std::size_t k = 0; k < active.size(); ++k) {
        const std::size_t i = active[k];
        const double z = agent_z(mc.seed, i, t);
        locals[k].agent_id = i;
        locals[k].x_hat = profile[i].estimate.apply(
            local_estimate_value(xi_x, profile[i].xi, common.x, z));
        locals[k].sigma_local = 1.0 / (xi_x + plan.xi_tilde[i]);
      }
      const GlobalEstimate g = fuse(prior, locals);
      const double err = g.x_hat_g - common.x;
      stats.add(err * err);
    }
    partial[b] = stats;
  });
  RunningStats total;
  for (const auto& s : partial) total.merge(s);
  return total.estimate();
}

}  // namespace incentive
