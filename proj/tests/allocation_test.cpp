#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "incentive/allocation.hpp"
#include "incentive/errors.hpp"
#include "incentive/oracles.hpp"
#include "incentive/population.hpp"
#include "incentive/rng.hpp"

namespace incentive {
namespace {

double sigma_for(const PriorModel& prior, double demand) {
  return 1.0 / (prior.precision() + demand);
}

std::vector<EffortCostModel> quadratic_fleet(std::size_t n, double l, double xi_u) {
  return std::vector<EffortCostModel>(n, EffortCostModel::quadratic(l, xi_u));
}

void expect_feasible(const AllocationProblem& p, const AllocationPlan& plan) {
  EXPECT_GE(p.prior.precision() + plan.added_precision(),
            1.0 / p.sigma_t - 1e-9);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!plan.phi[i]) EXPECT_EQ(plan.xi_tilde[i], 0.0);
    EXPECT_GE(plan.xi_tilde[i], 0.0);
    EXPECT_LE(plan.xi_tilde[i], p.costs[i].xi_u() * (1 + 1e-12));
  }
}

TEST(SelectionReduction, NonzeroEffortsBecomeSelections) {
  const auto prior = PriorModel::from_precision(0.1);
  const AllocationProblem p{prior, quadratic_fleet(3, 1.0, 1.0), sigma_for(prior, 0.5)};
  const std::vector<double> xi{0.2, 0.0, 0.3};
  const auto plan = reduce_to_selection(p, xi);
  EXPECT_EQ(plan.phi, (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_EQ(plan.xi_tilde, xi);
  EXPECT_DOUBLE_EQ(plan.total_cost, 0.04 + 0.09);
}

TEST(SelectionReduction, PriorAloneMeetsThreshold) {
  const auto prior = PriorModel::from_precision(0.5);
  const AllocationProblem p{prior, quadratic_fleet(3, 1.0, 1.0), 2.0};
  const auto plan = reduce_to_selection(p, std::vector<double>(3, 0.0));
  EXPECT_EQ(plan.selected_count(), 0u);
  EXPECT_EQ(plan.total_cost, 0.0);
}

TEST(SelectionReduction, RejectsInfeasibleEfforts) {
  const auto prior = PriorModel::from_precision(0.1);
  const AllocationProblem p{prior, quadratic_fleet(2, 1.0, 1.0), sigma_for(prior, 1.0)};
  EXPECT_THROW(reduce_to_selection(p, std::vector<double>{0.3, 0.3}), InfeasibleError);
}

TEST(SelectionProperty, JointSearchEqualsEffortOnlySearch) {
  for (std::uint64_t k = 0; k < 30; ++k) {
    Substream rng(31, k, 0);
    const auto prior = PriorModel::from_precision(0.01 + rng.uniform());
    const std::size_t n = 2 + rng() % 3;
    std::vector<EffortCostModel> fleet;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = 0.2 + rng.uniform();
      fleet.push_back(rng.uniform() < 0.5
                          ? EffortCostModel::quadratic(0.5 + rng.uniform(), u)
                          : EffortCostModel::discrete_linear(4.0 / u, 1.0 + rng.uniform(), 4));
      total += u;
    }
    const AllocationProblem p{prior, fleet, sigma_for(prior, total * rng.uniform())};
    const auto v = oracles::selection_brute_force(p, 5);
    ASSERT_TRUE(v.feasible);
    EXPECT_EQ(v.joint, v.effort_only) << "instance " << k;
  }
}

TEST(Quadratic, EqualSplitExample) {
  const auto prior = PriorModel::from_precision(0.1);
  const AllocationProblem p{prior, quadratic_fleet(4, 1.0, 10.0), 1.0};
  const auto plan = solve_quadratic(p);
  for (double xi : plan.xi_tilde) EXPECT_NEAR(xi, 0.225, 1e-15);
  EXPECT_NEAR(plan.total_cost, 0.2025, 1e-15);
  const auto grid = oracles::separable_grid_minimum(p, 2001);
  EXPECT_NEAR(grid.cost, plan.total_cost, 1e-3);
}

TEST(Quadratic, ThresholdAtPriorIsFree) {
  const auto prior = PriorModel::from_precision(0.25);
  const auto plan = solve_quadratic({prior, quadratic_fleet(3, 1.0, 1.0), 4.0});
  EXPECT_EQ(plan.selected_count(), 0u);
  EXPECT_EQ(plan.total_cost, 0.0);
}

TEST(Quadratic, ClampedActiveSet) {
  // Prior precision 0 is not representable; 1e-300 is indistinguishable here.
  const auto prior = PriorModel::from_precision(1e-300);
  const AllocationProblem p{prior,
                            {EffortCostModel::quadratic(1.0, 0.3),
                             EffortCostModel::quadratic(1.0, 1.0)},
                            1.0};
  const auto plan = solve_quadratic(p);
  EXPECT_NEAR(plan.xi_tilde[0], 0.3, 1e-15);
  EXPECT_NEAR(plan.xi_tilde[1], 0.7, 1e-15);
  EXPECT_NEAR(plan.total_cost, 0.58, 1e-15);

  // Brute 2-D grid over xi_1 with xi_2 taking the remainder.
  double best = 1e300;
  for (int k = 0; k <= 30000; ++k) {
    const double a = 0.3 * k / 30000.0;
    const double b = 1.0 - a;
    if (b <= 1.0) best = std::min(best, a * a + b * b);
  }
  EXPECT_NEAR(plan.total_cost, best, 1e-8);
}

TEST(Quadratic, InfeasibleNamesShortfall) {
  const auto prior = PriorModel::from_precision(0.1);
  try {
    solve_quadratic({prior, quadratic_fleet(2, 1.0, 0.2), sigma_for(prior, 1.0)});
    FAIL() << "expected infeasibility";
  } catch (const InfeasibleError& e) {
    EXPECT_NEAR(e.shortfall(), 0.6, 1e-12);
  }
}

TEST(Quadratic, RejectsMixedCoefficients) {
  const auto prior = PriorModel::from_precision(0.1);
  const AllocationProblem p{prior,
                            {EffortCostModel::quadratic(1.0, 1.0),
                             EffortCostModel::quadratic(2.0, 1.0)},
                            1.0};
  EXPECT_THROW(solve_quadratic(p), ConfigError);
}

TEST(Bkp, SingleAgentTakesCeiling) {
  const auto prior = PriorModel::from_precision(0.001);
  const AllocationProblem p{prior,
                            {EffortCostModel::discrete_linear(100.0, 5.0, 10)},
                            sigma_for(prior, 0.035)};
  const auto plan = solve_bkp(p);
  EXPECT_EQ(p.costs[0].count_for(plan.xi_tilde[0]), 4);
  EXPECT_DOUBLE_EQ(plan.total_cost, 20.0);
}

TEST(Bkp, NonPositiveDemandIsFree) {
  const auto prior = PriorModel::from_precision(1.0);
  const auto plan = solve_bkp({prior, {EffortCostModel::discrete_linear(1.0, 1.0, 3)}, 2.0});
  EXPECT_EQ(plan.total_cost, 0.0);
  EXPECT_EQ(plan.selected_count(), 0u);
}

TEST(Bkp, ResolutionCoarserThanReadingIsConfigError) {
  const auto prior = PriorModel::from_precision(0.001);
  SolverOptions options;
  options.bkp_resolution = 0.5;
  const AllocationProblem p{prior, {EffortCostModel::discrete_linear(100.0, 5.0, 10)},
                            sigma_for(prior, 0.035)};
  EXPECT_THROW(solve_bkp(p, options), ConfigError);
}

TEST(Bkp, InfeasibleThreshold) {
  const auto prior = PriorModel::from_precision(0.001);
  const AllocationProblem p{prior, {EffortCostModel::discrete_linear(100.0, 5.0, 2)},
                            sigma_for(prior, 0.5)};
  EXPECT_THROW(solve_bkp(p), InfeasibleError);
}

TEST(BkpProperty, LatticeInstancesMatchEnumeration) {
  for (std::uint64_t k = 0; k < 100; ++k) {
    Substream rng(41, k, 0);
    const auto prior = PriorModel::from_precision(1.0 / 128.0);
    const std::size_t n = 1 + rng() % 5;
    std::vector<EffortCostModel> fleet;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int eta = 1 + static_cast<int>(rng() % 4);
      const double unit = static_cast<double>(1 + rng() % 32) / 128.0;
      fleet.push_back(EffortCostModel::discrete_linear(
          1.0 / unit, static_cast<double>(1 + rng() % 30), eta));
      total += eta * unit;
    }
    const AllocationProblem p{prior, fleet, sigma_for(prior, total * rng.uniform())};
    SolverOptions options;
    options.bkp_resolution = 1.0 / 128.0;
    const auto plan = solve_bkp(p, options);
    const auto oracle = oracles::bounded_knapsack(p);
    EXPECT_EQ(plan.total_cost, oracle.cost) << "instance " << k;
    expect_feasible(p, plan);
  }
}

// Real-valued reading precisions: the answer is feasible, never below the
// exhaustive optimum and within the reported rounding gap of it.
TEST(BkpProperty, RealWeightsStayWithinReportedGap) {
  int exact = 0;
  const int instances = 100;
  for (std::uint64_t k = 0; k < instances; ++k) {
    Substream rng(43, k, 0);
    const auto prior = PriorModel::from_precision(0.001);
    const std::size_t n = 2 + rng() % 4;
    std::vector<EffortCostModel> fleet;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int eta = 1 + static_cast<int>(rng() % 4);
      const double xi_u = 1e-3 + 1e-2 * rng.uniform();
      fleet.push_back(
          EffortCostModel::discrete_linear(eta / xi_u, (50 + 50 * rng.uniform()) / eta, eta));
      total += xi_u;
    }
    const AllocationProblem p{prior, fleet, sigma_for(prior, total * rng.uniform())};
    const auto plan = solve_bkp(p);
    const auto oracle = oracles::bounded_knapsack(p);
    expect_feasible(p, plan);
    EXPECT_GE(plan.total_cost, oracle.cost * (1 - 1e-12));
    EXPECT_LE(plan.total_cost, oracle.cost + plan.quantization_gap + 1e-9);
    if (std::abs(plan.total_cost - oracle.cost) <= 1e-9 * oracle.cost) ++exact;
  }
  EXPECT_GE(exact, instances * 9 / 10);
}

TEST(BinaryKp, HandExample) {
  const auto prior = PriorModel::from_precision(0.01);
  const AllocationProblem p{prior,
                            {EffortCostModel::discrete_linear(2.0, 10.0, 1),
                             EffortCostModel::discrete_linear(2.0, 12.0, 1),
                             EffortCostModel::discrete_linear(1.0, 15.0, 1)},
                            sigma_for(prior, 1.0)};
  const auto plan = solve_binary_kp(p);
  EXPECT_EQ(plan.phi, (std::vector<std::uint8_t>{0, 0, 1}));
  EXPECT_EQ(plan.total_cost, 15.0);
}

TEST(BinaryKp, ZeroDemandIsEmpty) {
  const auto prior = PriorModel::from_precision(1.0);
  const auto plan = solve_binary_kp({prior, quadratic_fleet(3, 1.0, 1.0), 1.0});
  EXPECT_EQ(plan.selected_count(), 0u);
  EXPECT_EQ(plan.total_cost, 0.0);
}

TEST(BinaryKp, OversizedScaleIsConfigError) {
  const auto prior = PriorModel::from_precision(0.001);
  SolverOptions options;
  options.kp_scale = 1e12;
  const AllocationProblem p{prior, quadratic_fleet(3, 1.0, 1.0), sigma_for(prior, 2.0)};
  EXPECT_THROW(solve_binary_kp(p, options), ConfigError);
}

TEST(BinaryKpProperty, MatchesSubsetEnumeration) {
  for (std::uint64_t k = 0; k < 80; ++k) {
    Substream rng(47, k, 0);
    const auto prior = PriorModel::from_precision(0.01);
    const std::size_t n = 1 + rng() % 12;
    std::vector<EffortCostModel> fleet;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi_u = 0.01 + rng.uniform();
      fleet.push_back(rng.uniform() < 0.5
                          ? EffortCostModel::quadratic(1.0 + 9 * rng.uniform(), xi_u)
                          : EffortCostModel::discrete_linear(1.0 / xi_u, 1.0 + 20 * rng.uniform(), 1));
      total += xi_u;
    }
    const AllocationProblem p{prior, fleet, sigma_for(prior, total * rng.uniform())};
    const auto plan = solve_binary_kp(p);
    const auto oracle = oracles::binary_knapsack(p);
    expect_feasible(p, plan);
    EXPECT_NEAR(plan.total_cost, oracle.cost, 1e-9 * oracle.cost) << "instance " << k;
  }
}

TEST(Continuous, HeterogeneousQuadraticsMatchGrid) {
  const auto prior = PriorModel::from_precision(0.05);
  const AllocationProblem p{prior,
                            {EffortCostModel::quadratic(1.0, 1.0),
                             EffortCostModel::quadratic(2.0, 1.0),
                             EffortCostModel::quadratic(4.0, 0.4)},
                            sigma_for(prior, 1.2)};
  const auto plan = solve_continuous(p);
  expect_feasible(p, plan);
  // Lagrange: xi_i proportional to 1/l_i -> (4, 2, 1)/7 * 1.2.
  EXPECT_NEAR(plan.xi_tilde[0], 1.2 * 4 / 7, 1e-6);
  EXPECT_NEAR(plan.xi_tilde[1], 1.2 * 2 / 7, 1e-6);
  EXPECT_NEAR(plan.xi_tilde[2], 1.2 * 1 / 7, 1e-6);
  const auto grid = oracles::separable_grid_minimum(p, 1001);
  EXPECT_LE(plan.total_cost, grid.cost + 1e-9);
  EXPECT_NEAR(plan.total_cost, grid.cost, 1e-3);
}

TEST(Continuous, ConvexTabulatedMatchesGrid) {
  const auto prior = PriorModel::from_precision(0.1);
  const AllocationProblem p{
      prior,
      {EffortCostModel::tabulate([](double x) { return x * x * x + 0.5 * x; }, 1.0, 2001, 1),
       EffortCostModel::tabulate([](double x) { return 2 * x * x + x; }, 1.0, 2001, 1),
       EffortCostModel::quadratic(1.5, 1.0)},
      sigma_for(prior, 1.1)};
  const auto plan = solve_continuous(p);
  expect_feasible(p, plan);
  const auto grid = oracles::separable_grid_minimum(p, 1001);
  EXPECT_NEAR(plan.total_cost, grid.cost, 2e-3);
}

TEST(Solve, DispatchesByCostFamily) {
  const auto prior = PriorModel::from_precision(0.1);
  const double s = sigma_for(prior, 0.9);

  const AllocationProblem quad{prior, quadratic_fleet(4, 1.0, 1.0), s};
  const auto a = solve(quad);
  EXPECT_EQ(a.regime, Regime::optimal);
  EXPECT_EQ(a.plan.total_cost, solve_quadratic(quad).total_cost);

  const AllocationProblem disc{
      prior, std::vector<EffortCostModel>(4, EffortCostModel::discrete_linear(10.0, 1.0, 4)), s};
  const auto b = solve(disc);
  EXPECT_EQ(b.regime, Regime::optimal);
  EXPECT_EQ(b.plan.total_cost, solve_bkp(disc).total_cost);

  auto fleet = quadratic_fleet(3, 1.0, 1.0);
  fleet.push_back(EffortCostModel::tabulate(
      [](double x) { return 2.0 * (1.0 - std::exp(-30.0 * x)); }, 1.0, 2001, 1));
  const AllocationProblem mixed{prior, fleet, s};
  const auto c = solve(mixed);
  EXPECT_EQ(c.regime, Regime::suboptimal);
  EXPECT_EQ(c.plan.total_cost, solve_binary_kp(mixed).total_cost);
}

TEST(PaymentProperty, NonIncreasingInThreshold) {
  const auto fleet = generate_population(40, 3, 5);
  const auto prior = PriorModel::from_variance(1000.0);
  double previous = 1e300;
  for (double s = 8.0; s <= 1000.0; s *= 1.3) {
    const auto plan = solve_bkp({prior, fleet, s});
    EXPECT_LE(plan.total_cost, previous * (1 + 1e-12)) << s;
    previous = plan.total_cost;
  }
}

TEST(PaymentProperty, AddingAgentsNeverHurts) {
  const auto big = generate_population(30, 2, 9);
  const auto prior = PriorModel::from_variance(1000.0);
  for (double s : {5.0, 20.0, 80.0}) {
    double previous = 1e300;
    for (std::size_t n = 15; n <= 30; n += 5) {
      const std::vector<EffortCostModel> fleet(big.begin(), big.begin() + n);
      try {
        const auto plan = solve_bkp({prior, fleet, s});
        EXPECT_LE(plan.total_cost, previous * (1 + 1e-12));
        previous = plan.total_cost;
      } catch (const InfeasibleError&) {
        EXPECT_EQ(previous, 1e300);
      }
    }
  }
}

TEST(PaymentProperty, FinerReadingsNeverHurt) {
  PopulationSpec spec;
  spec.agents = 30;
  const auto population = draw_population(spec, 77);
  const auto prior = PriorModel::from_variance(1000.0);
  for (double s : {10.0, 14.0, 40.0, 150.0}) {
    const double two = solve_bkp({prior, population.fleet(2), s}).total_cost;
    const double four = solve_bkp({prior, population.fleet(4), s}).total_cost;
    EXPECT_LE(four, two * (1 + 1e-9)) << s;
  }
}

TEST(SweepTables, AgreeWithPerRowSolves) {
  const auto fleet = generate_population(25, 2, 3);
  const auto prior = PriorModel::from_variance(1000.0);
  const double top = AllocationProblem{prior, {}, 12.0}.demand();
  const BoundedKnapsackTable bkp(prior, fleet, top);
  const BinaryKnapsackTable binary(prior, fleet, top);
  for (double s : {12.0, 17.0, 33.0, 400.0}) {
    const AllocationProblem p{prior, fleet, s};
    EXPECT_LE(bkp.plan_for(s).total_cost, binary.plan_for(s).total_cost * (1 + 1e-12));
    EXPECT_EQ(binary.plan_for(s).total_cost, solve_binary_kp(p).total_cost);
    expect_feasible(p, bkp.plan_for(s));
  }
}

}  // namespace
}  // namespace incentive
