#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "incentive/errors.hpp"
#include "incentive/game.hpp"
#include "incentive/mechanism.hpp"

namespace incentive {
namespace {

AllocationPlan plan_of(std::vector<double> xi) {
  AllocationPlan plan;
  plan.xi_tilde = xi;
  for (double v : xi) plan.phi.push_back(v > 0.0 ? 1 : 0);
  return plan;
}

Game quadratic_game(double xi_x = 1.0) {
  Game game{PriorModel::from_precision(xi_x),
            std::vector<EffortCostModel>(3, EffortCostModel::quadratic(1.0, 2.0)),
            {}};
  game.rule = calibrate_m1(game.prior, game.costs, plan_of({1.0, 0.5, 1.5}));
  return game;
}

Game saturating_game(std::optional<double> honest_xi = std::nullopt) {
  Game game{PriorModel::from_precision(0.5), {}, {}};
  for (double a : {1.0, 2.0}) {
    game.costs.push_back(EffortCostModel::tabulate(
        [a](double x) { return a * (1.0 - std::exp(-5.0 * x)); }, 1.0, 2001, 1));
  }
  MechanismOptions options;
  options.honest_xi = honest_xi;
  game.rule = calibrate_m2(game.prior, game.costs, plan_of({1.0, 1.0}), options);
  return game;
}

TEST(SimulateAgent, ZeroExpectedUtilityAtTarget) {
  const auto game = quadratic_game();
  const auto profile = equilibrium_profile(game.rule);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto out = simulate_agent(game, profile, i, {200000, 5, 1});
    EXPECT_NEAR(out.utility.mean, 0.0, 3.0 * out.utility.standard_error);
    EXPECT_NEAR(out.payment.mean, game.costs[i].cost(profile[i].xi),
                3.0 * out.payment.standard_error);
  }
}

TEST(SimulateAgent, ZeroEffortClosedForm) {
  // With no reading the estimate is 0, so E[p] = gamma - beta (sigma_x^2 +
  // 1/xi_peer).
  const auto game = quadratic_game(0.25);
  auto profile = equilibrium_profile(game.rule);
  profile[0].xi = 0.0;
  const auto& e = game.rule.entries[0];
  const double expect = e.gamma - e.beta * (4.0 + 1.0 / 0.5);
  const auto out = simulate_agent(game, profile, 0, {200000, 9, 1});
  EXPECT_NEAR(out.utility.mean, expect, 3.0 * out.utility.standard_error);
}

TEST(SimulateAgent, DeterministicAcrossJobs) {
  const auto game = quadratic_game();
  const auto profile = equilibrium_profile(game.rule);
  const auto a = simulate_agent(game, profile, 1, {10000, 3, 1});
  const auto b = simulate_agent(game, profile, 1, {10000, 3, 4});
  const auto c = simulate_agent(game, profile, 1, {10000, 3, 1});
  EXPECT_EQ(a.payment.mean, b.payment.mean);
  EXPECT_EQ(a.payment.standard_error, b.payment.standard_error);
  EXPECT_EQ(a.utility.mean, c.utility.mean);
  const auto d = simulate_agent(game, profile, 1, {10000, 4, 1});
  EXPECT_NE(a.payment.mean, d.payment.mean);
}

TEST(SimulateAgent, RejectsBadProfiles) {
  const auto game = quadratic_game();
  auto profile = equilibrium_profile(game.rule);
  profile[0].xi = 3.0;
  EXPECT_THROW(simulate_agent(game, profile, 0, {100, 1, 1}), DomainError);
  profile.pop_back();
  EXPECT_THROW(simulate_agent(game, profile, 0, {100, 1, 1}), InvariantError);
  EXPECT_THROW(simulate_agent(game, equilibrium_profile(game.rule), 0, {0, 1, 1}),
               DomainError);
}

TEST(SimulateAgent, MeasurementReportDoesNotMoveOwnUtility) {
  const auto game = quadratic_game();
  auto profile = equilibrium_profile(game.rule);
  const auto base = simulate_agent(game, profile, 0, {8192, 2, 1});
  profile[0].measurement = ReportPolicy::affine(2.0, 1.0);
  const auto moved = simulate_agent(game, profile, 0, {8192, 2, 1});
  EXPECT_EQ(base.utility.mean, moved.utility.mean);
  // Its peer, agent 2, is scored against agent 0's measurement.
  profile[0].measurement = ReportPolicy::truthful();
  const auto peer_base = simulate_agent(game, profile, 2, {8192, 2, 1});
  profile[0].measurement = ReportPolicy::affine(2.0, 1.0);
  const auto peer_moved = simulate_agent(game, profile, 2, {8192, 2, 1});
  EXPECT_LT(peer_moved.utility.mean, peer_base.utility.mean);
}

TEST(SimulateAgent, TruthfulEstimateBeatsDistortionsAtFixedEffort) {
  const auto game = quadratic_game();
  auto profile = equilibrium_profile(game.rule);
  const double truthful = expected_utility(game, profile, 1, {50000, 6, 1}).mean;
  for (const auto& policy : default_report_policies()) {
    if (policy.kind == ReportPolicy::Kind::truthful) continue;
    profile[1].estimate = policy;
    EXPECT_LT(expected_utility(game, profile, 1, {50000, 6, 1}).mean, truthful)
        << policy.name();
  }
}

TEST(VerifyEquilibrium, QuadraticOptimalRuleHolds) {
  const auto game = quadratic_game();
  const auto reports =
      verify_equilibrium(game, equilibrium_profile(game.rule), {}, {100000, 11, 1});
  for (const auto& r : reports) {
    EXPECT_EQ(r.verdict, Verdict::no_profitable_deviation) << "agent " << r.agent;
  }
}

TEST(VerifyEquilibrium, DiscreteOptimalRuleHolds) {
  Game game{PriorModel::from_variance(1000.0), {}, {}};
  game.costs = {EffortCostModel::discrete_linear(200.0, 40.0, 2),
                EffortCostModel::discrete_linear(400.0, 70.0, 2),
                EffortCostModel::discrete_linear(150.0, 90.0, 2)};
  game.rule = calibrate_m1(game.prior, game.costs,
                           plan_of({2.0 / 200.0, 1.0 / 400.0, 2.0 / 150.0}));
  const auto reports =
      verify_equilibrium(game, equilibrium_profile(game.rule), {}, {100000, 12, 1});
  for (const auto& r : reports) {
    EXPECT_EQ(r.verdict, Verdict::no_profitable_deviation) << "agent " << r.agent;
  }
}

TEST(VerifyEquilibrium, FallbackRuleHoldsForSaturatingCosts) {
  const auto game = saturating_game();
  ASSERT_FALSE(realizability_holds(game.costs[0], game.prior.precision()));
  const auto reports =
      verify_equilibrium(game, equilibrium_profile(game.rule), {}, {100000, 13, 1});
  for (const auto& r : reports) {
    EXPECT_EQ(r.verdict, Verdict::no_profitable_deviation) << "agent " << r.agent;
  }
}

TEST(VerifyEquilibrium, HalvedBetaIsCaught) {
  auto game = quadratic_game();
  for (auto& e : game.rule.entries) e.beta *= 0.5;
  const auto reports =
      verify_equilibrium(game, equilibrium_profile(game.rule), {}, {100000, 14, 1});
  bool caught = false;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::profitable_deviation_found) {
      caught = true;
      EXPECT_LT(r.best_xi, game.rule.entries[r.agent].xi_target);
    }
  }
  EXPECT_TRUE(caught);
}

TEST(VerifyDominance, HonestAgentMakesTruthDominant) {
  const auto game = saturating_game(2.0);
  const auto candidate = equilibrium_profile(game.rule);
  StrategyProfile idle(2), noisy(2);
  for (auto& s : idle) s.measurement = ReportPolicy::constant(0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    noisy[i].xi = 0.5;
    noisy[i].estimate = ReportPolicy::affine(2.0, 1.0);
    noisy[i].measurement = ReportPolicy::affine(2.0, 1.0);
  }
  const std::vector<StrategyProfile> opponents{idle, noisy};
  const auto flags = verify_dominance(game, candidate, opponents, {}, {50000, 15, 1});
  for (bool f : flags) EXPECT_TRUE(f);
}

TEST(VerifyDominance, RequiresHonestAgent) {
  const auto game = saturating_game();
  const std::vector<StrategyProfile> opponents{equilibrium_profile(game.rule)};
  EXPECT_THROW(verify_dominance(game, equilibrium_profile(game.rule), opponents, {},
                                {1000, 1, 1}),
               ConfigError);
}

TEST(RealizedGlobalError, MatchesClosedForms) {
  const auto prior = PriorModel::from_variance(9.0);
  {
    const auto plan = plan_of({0.0, 0.0});
    const auto e = realized_global_error(StrategyProfile(2), plan, prior, {100000, 21, 1});
    EXPECT_NEAR(e.mean, 9.0, 3.0 * e.standard_error);
  }
  {
    const double xi_x = prior.precision();
    const auto plan = plan_of({xi_x, 0.0});
    StrategyProfile profile(2);
    profile[0].xi = xi_x;
    const auto e = realized_global_error(profile, plan, prior, {100000, 22, 1});
    EXPECT_NEAR(e.mean, 4.5, 3.0 * e.standard_error);
  }
  {
    const auto plan = plan_of({0.3, 0.5, 0.2});
    StrategyProfile profile(3);
    for (std::size_t i = 0; i < 3; ++i) profile[i].xi = plan.xi_tilde[i];
    const auto e = realized_global_error(profile, plan, prior, {100000, 23, 1});
    EXPECT_NEAR(e.mean, plan.global_mse(prior), 3.0 * e.standard_error);
  }
}

}  // namespace
}  // namespace incentive
