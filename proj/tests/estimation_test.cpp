#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "incentive/errors.hpp"
#include "incentive/estimation.hpp"
#include "incentive/oracles.hpp"
#include "incentive/rng.hpp"
#include "incentive/stats.hpp"

namespace incentive {
namespace {

// E[X | y] from the joint covariance of (X, y_1..y_n), solved by Gaussian
// elimination with partial pivoting.
double conditional_mean(double sigma2_x, const std::vector<double>& xi,
                        const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      a[r][c] = sigma2_x + (r == c ? 1.0 / xi[r] : 0.0);
    }
    a[r][n] = y[r];
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
    }
    std::swap(a[c], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  double mean = 0.0;
  for (std::size_t r = 0; r < n; ++r) mean += sigma2_x * a[r][n] / a[r][r];
  return mean;
}

TEST(PriorModel, PrecisionAndVarianceAreReciprocal) {
  const auto p = PriorModel::from_variance(1000.0);
  EXPECT_DOUBLE_EQ(p.precision(), 0.001);
  EXPECT_DOUBLE_EQ(p.variance() * p.precision(), 1.0);
  EXPECT_THROW(PriorModel::from_precision(0.0), DomainError);
  EXPECT_THROW(PriorModel::from_variance(-1.0), DomainError);
}

TEST(LocalEstimate, ZeroEffortReturnsPrior) {
  const auto prior = PriorModel::from_precision(1.0);
  const auto e = local_estimate(prior, {0, 2.0, 0.0});
  EXPECT_EQ(e.x_hat, 0.0);
  EXPECT_EQ(e.sigma_local, 1.0);
}

TEST(LocalEstimate, EqualPrecisionsSplitTheMeasurement) {
  const auto e = local_estimate(PriorModel::from_precision(1.0), {0, 2.0, 1.0});
  EXPECT_DOUBLE_EQ(e.x_hat, 1.0);
  EXPECT_DOUBLE_EQ(e.sigma_local, 0.5);
}

TEST(LocalEstimate, MatchesGridPosterior) {
  const auto prior = PriorModel::from_variance(1000.0);
  const Measurement m{0, 10.0, 0.009};
  const auto e = local_estimate(prior, m);
  EXPECT_NEAR(e.x_hat, 9.0, 1e-12);
  EXPECT_NEAR(e.sigma_local, 100.0, 1e-10);

  const auto grid = oracles::posterior_by_grid(prior, {&m, 1});
  EXPECT_NEAR(grid.mean, e.x_hat, 1e-6);
  EXPECT_NEAR(grid.variance, e.sigma_local, 1e-4);
}

TEST(LocalEstimate, RejectsNonFiniteMeasurement) {
  const auto prior = PriorModel::from_precision(1.0);
  EXPECT_THROW(local_estimate(prior, {0, NAN, 1.0}), DomainError);
  EXPECT_THROW(local_estimate(prior, {0, INFINITY, 1.0}), DomainError);
  EXPECT_THROW(local_estimate(prior, {0, 1.0, -1.0}), DomainError);
}

TEST(Fuse, EmptyReturnsPrior) {
  const auto prior = PriorModel::from_variance(4.0);
  const auto g = fuse(prior, {});
  EXPECT_EQ(g.x_hat_g, 0.0);
  EXPECT_DOUBLE_EQ(g.sigma_g, 4.0);
}

TEST(Fuse, TwoAgentsMatchJointGaussian) {
  const auto prior = PriorModel::from_precision(1.0);
  const std::vector<LocalEstimate> locals{{0, 1.0, 0.5}, {1, 1.0, 0.5}};
  const auto g = fuse(prior, locals);
  EXPECT_NEAR(g.sigma_g, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(g.x_hat_g, 4.0 / 3.0, 1e-15);
  // x_hat = 1 with xi = 1 and xi_x = 1 means y = 2 for each agent.
  EXPECT_NEAR(conditional_mean(1.0, {1.0, 1.0}, {2.0, 2.0}), g.x_hat_g, 1e-12);
}

TEST(Fuse, SingleAgentEqualsLocal) {
  const auto prior = PriorModel::from_precision(0.3);
  const auto local = local_estimate(prior, {0, -1.7, 2.2});
  const LocalEstimate arr[] = {local};
  const auto g = fuse(prior, arr);
  EXPECT_DOUBLE_EQ(g.x_hat_g, local.x_hat);
  EXPECT_DOUBLE_EQ(g.sigma_g, local.sigma_local);
}

TEST(Fuse, RejectsLocalWorseThanPrior) {
  const auto prior = PriorModel::from_precision(1.0);
  const LocalEstimate bad[] = {{0, 0.0, 1.5}};
  EXPECT_THROW(fuse(prior, bad), InvariantError);
}

TEST(FuseProperty, PrecisionAdditivityAndOracle) {
  for (std::uint64_t k = 0; k < 500; ++k) {
    Substream rng(99, k, 0);
    const double xi_x = std::exp(-6.0 + 7.0 * rng.uniform());
    const auto prior = PriorModel::from_precision(xi_x);
    const std::size_t n = 1 + rng() % 3;
    std::vector<double> xi(n), y(n);
    std::vector<LocalEstimate> locals;
    double sum = xi_x;
    for (std::size_t i = 0; i < n; ++i) {
      xi[i] = std::exp(-4.0 + 6.0 * rng.uniform());
      y[i] = 20.0 * rng.normal();
      sum += xi[i];
      locals.push_back(local_estimate(prior, {i, y[i], xi[i]}));
    }
    const auto g = fuse(prior, locals);
    EXPECT_NEAR(1.0 / g.sigma_g, sum, 1e-12 * sum);
    const double oracle = conditional_mean(1.0 / xi_x, xi, y);
    EXPECT_NEAR(g.x_hat_g, oracle, 1e-10 * std::max(1.0, std::abs(oracle)));
    for (const auto& l : locals) EXPECT_LE(g.sigma_g, l.sigma_local * (1 + 1e-12));
  }
}

TEST(FuseProperty, AddingAnInformativeAgentStrictlyHelps) {
  const auto prior = PriorModel::from_precision(0.01);
  std::vector<LocalEstimate> locals;
  double previous = fuse(prior, locals).sigma_g;
  for (std::size_t i = 0; i < 20; ++i) {
    locals.push_back(local_estimate(prior, {i, 1.0, 1e-3 * (i + 1)}));
    const double now = fuse(prior, locals).sigma_g;
    EXPECT_LT(now, previous);
    previous = now;
  }
}

TEST(SampleWorld, DeterministicPerSeed) {
  const auto prior = PriorModel::from_variance(10.0);
  const std::vector<double> efforts{0.5, 0.0, 2.0};
  const auto a = sample_world(prior, efforts, 42, 3);
  const auto b = sample_world(prior, efforts, 42, 3);
  EXPECT_EQ(a.x, b.x);
  for (std::size_t i = 0; i < efforts.size(); ++i) {
    EXPECT_EQ(a.measurements[i].y, b.measurements[i].y);
  }
  const auto c = sample_world(prior, efforts, 43, 3);
  EXPECT_NE(a.x, c.x);
}

TEST(SampleWorld, AddingAnAgentLeavesOthersUntouched) {
  const auto prior = PriorModel::from_variance(10.0);
  const std::vector<double> two{0.5, 1.0};
  const std::vector<double> three{0.5, 1.0, 3.0};
  const auto a = sample_world(prior, two, 5, 11);
  const auto b = sample_world(prior, three, 5, 11);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.measurements[0].y, b.measurements[0].y);
  EXPECT_EQ(a.measurements[1].y, b.measurements[1].y);
}

TEST(SampleWorld, ZeroEffortsGivePriorEstimates) {
  const auto prior = PriorModel::from_variance(10.0);
  const std::vector<double> efforts(4, 0.0);
  const auto w = sample_world(prior, efforts, 1, 0);
  for (const auto& m : w.measurements) {
    EXPECT_FALSE(m.informative());
    EXPECT_EQ(local_estimate(prior, m).x_hat, 0.0);
  }
}

TEST(SampleWorld, NoiseVarianceMatchesPrecision) {
  const auto prior = PriorModel::from_variance(50.0);
  const std::vector<double> efforts{0.25, 4.0};
  RunningStats s0, s1;
  // Squared noise has mean 1/xi.
  for (std::uint64_t t = 0; t < 100000; ++t) {
    const auto w = sample_world(prior, efforts, 17, t);
    s0.add(std::pow(w.measurements[0].y - w.x, 2));
    s1.add(std::pow(w.measurements[1].y - w.x, 2));
  }
  EXPECT_NEAR(s0.mean(), 4.0, 3.0 * s0.estimate().standard_error);
  EXPECT_NEAR(s1.mean(), 0.25, 3.0 * s1.estimate().standard_error);
}

TEST(SampleWorld, FusedMseMatchesGlobalPrecision) {
  const auto prior = PriorModel::from_variance(20.0);
  const std::vector<double> efforts{0.1, 0.3, 0.05};
  RunningStats err;
  for (std::uint64_t t = 0; t < 100000; ++t) {
    const auto w = sample_world(prior, efforts, 23, t);
    std::vector<LocalEstimate> locals;
    for (const auto& m : w.measurements) locals.push_back(local_estimate(prior, m));
    err.add(std::pow(fuse(prior, locals).x_hat_g - w.x, 2));
  }
  const double sigma_g = 1.0 / (0.05 + 0.1 + 0.3 + 0.05);
  EXPECT_NEAR(err.mean(), sigma_g, 3.0 * err.estimate().standard_error);
}

TEST(RunningStats, MergeMatchesSequential) {
  RunningStats all, left, right;
  Substream rng(3, 0, 0);
  for (int k = 0; k < 1000; ++k) {
    const double v = rng.normal() * 3 + 1;
    all.add(v);
    (k < 437 ? left : right).add(v);
  }
  left.merge(right);
  EXPECT_EQ(left.count(), all.count());
  EXPECT_NEAR(left.mean(), all.mean(), 1e-12);
  EXPECT_NEAR(left.variance(), all.variance(), 1e-10);
}

TEST(ForEachBlock, ResultIndependentOfWorkers) {
  auto run = [](int jobs) {
    const std::size_t trials = 3 * kTrialBlock + 17;
    std::vector<RunningStats> partial(block_count(trials));
    for_each_block(trials, jobs, [&](std::size_t b, std::size_t f, std::size_t l) {
      for (std::size_t t = f; t < l; ++t) partial[b].add(Substream(9, 0, t).normal());
    });
    RunningStats total;
    for (const auto& p : partial) total.merge(p);
    return total.estimate();
  };
  const auto one = run(1);
  const auto four = run(4);
  EXPECT_EQ(one.mean, four.mean);
  EXPECT_EQ(one.standard_error, four.standard_error);
  EXPECT_EQ(one.samples, 3 * kTrialBlock + 17);
}

}  // namespace
}  // namespace incentive
