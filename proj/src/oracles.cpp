#include "incentive/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "incentive/errors.hpp"

namespace incentive::oracles {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool meets(double added, double demand) {
  return added >= demand - 1e-12 * std::max(1.0, std::abs(demand));
}

double peer_precision(const PaymentRule& rule, std::size_t i) {
  const auto& e = rule.entries[i];
  if (e.peer == kHonestPeer) return rule.honest_xi.value();
  return rule.entries.at(e.peer).xi_target;
}

}  // namespace

BruteForceResult binary_knapsack(const AllocationProblem& problem) {
  const std::size_t n = problem.costs.size();
  if (n > 24) throw DomainError("binary knapsack oracle is limited to 24 agents");
  const double demand = problem.demand();
  BruteForceResult best;
  best.cost = kInf;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double added = 0.0, cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) {
        added += problem.costs[i].xi_u();
        cost += problem.costs[i].c_u();
      }
    }
    if (meets(added, demand) && cost < best.cost) {
      best.cost = cost;
      best.feasible = true;
      best.counts.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) best.counts[i] = mask >> i & 1U;
    }
  }
  return best;
}

BruteForceResult bounded_knapsack(const AllocationProblem& problem) {
  const std::size_t n = problem.costs.size();
  std::vector<int> limit(n);
  double combos = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto* d = problem.costs[i].as_discrete();
    if (!d) throw DomainError("bounded knapsack oracle needs discrete costs");
    limit[i] = d->eta_max;
    combos *= d->eta_max + 1;
  }
  if (combos > 5e7) throw DomainError("bounded knapsack oracle instance too large");

  const double demand = problem.demand();
  BruteForceResult best;
  best.cost = kInf;
  std::vector<int> counts(n, 0);
  while (true) {
    double added = 0.0, cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto* d = problem.costs[i].as_discrete();
      added += counts[i] / d->sigma2_o;
      cost += counts[i] * d->c_o;
    }
    if (meets(added, demand) && cost < best.cost) {
      best.cost = cost;
      best.feasible = true;
      best.counts = counts;
    }
    std::size_t k = 0;
    while (k < n && counts[k] == limit[k]) counts[k++] = 0;
    if (k == n) break;
    ++counts[k];
  }
  return best;
}

GridOptimum separable_grid_minimum(const AllocationProblem& problem,
                                   std::size_t points) {
  if (points < 2) throw DomainError("grid needs at least two points");
  const std::size_t n = problem.costs.size();
  const double demand = problem.demand();
  GridOptimum out;
  out.xi.assign(n, 0.0);
  if (demand <= 0.0) return out;

  // Budget axis in units of h; each agent's grid is snapped onto it.
  double reach = 0.0;
  for (const auto& c : problem.costs) reach = std::max(reach, c.xi_u());
  const double h = reach / static_cast<double>(points - 1);
  const auto need = static_cast<std::size_t>(std::ceil(demand / h - 1e-9));

  // value[b] = cheapest cost reaching at least b steps with agents so far.
  std::vector<double> value(need + 1, kInf);
  value[0] = 0.0;
  std::vector<std::vector<std::size_t>> choice(n,
                                               std::vector<std::size_t>(need + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const auto steps =
        static_cast<std::size_t>(std::floor(problem.costs[i].xi_u() / h + 1e-9));
    std::vector<double> next(need + 1, kInf);
    for (std::size_t b = 0; b <= need; ++b) {
      for (std::size_t s = 0; s <= steps; ++s) {
        const std::size_t from = b > s ? b - s : 0;
        if (value[from] == kInf) continue;
        const double c = value[from] + problem.costs[i].envelope_cost(s * h);
        if (c < next[b]) {
          next[b] = c;
          choice[i][b] = s;
        }
        if (from == 0) break;
      }
    }
    value = std::move(next);
  }
  if (value[need] == kInf) {
    throw InfeasibleError("grid cannot reach the demand", demand);
  }
  out.cost = value[need];
  std::size_t b = need;
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t s = choice[i][b];
    out.xi[i] = s * h;
    b = b > s ? b - s : 0;
  }
  return out;
}

SelectionCheck selection_brute_force(const AllocationProblem& problem,
                                std::size_t levels) {
  const std::size_t n = problem.costs.size();
  if (levels < 2 || std::pow(2.0 * levels, n) > 5e7) {
    throw DomainError("selection oracle instance too large");
  }
  std::vector<std::vector<double>> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < levels; ++k) {
      grid[i].push_back(problem.costs[i].xi_u() * k / (levels - 1));
    }
  }
  const double demand = problem.demand();
  SelectionCheck out{kInf, kInf, false};
  std::vector<std::size_t> idx(n, 0);

  auto advance = [&](std::vector<std::size_t>& v, std::size_t base) {
    std::size_t k = 0;
    while (k < n && v[k] + 1 == base) v[k++] = 0;
    if (k == n) return false;
    ++v[k];
    return true;
  };

  do {
    double added = 0.0, cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      added += grid[i][idx[i]];
      cost += problem.costs[i].envelope_cost(grid[i][idx[i]]);
    }
    if (meets(added, demand)) out.effort_only = std::min(out.effort_only, cost);

    for (std::uint64_t phi = 0; phi < (std::uint64_t{1} << n); ++phi) {
      double joint_added = 0.0, joint_cost = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (phi >> i & 1U) {
          joint_added += grid[i][idx[i]];
          joint_cost += problem.costs[i].envelope_cost(grid[i][idx[i]]);
        }
      }
      if (meets(joint_added, demand)) out.joint = std::min(out.joint, joint_cost);
    }
  } while (advance(idx, levels));
  out.feasible = out.joint < kInf;
  return out;
}

GridPosterior posterior_by_grid(const PriorModel& prior,
                                std::span<const Measurement> measurements,
                                std::size_t points, double width) {
  const double sd = std::sqrt(prior.variance());
  const double lo = -width * sd, hi = width * sd;
  const double dx = (hi - lo) / static_cast<double>(points - 1);

  // Log-density up to a constant; shifted by its maximum before exp.
  auto log_density = [&](double x) {
    double v = -0.5 * prior.precision() * x * x;
    for (const auto& m : measurements) {
      if (m.xi > 0.0) v -= 0.5 * m.xi * (m.y - x) * (m.y - x);
    }
    return v;
  };
  double peak = -kInf;
  for (std::size_t k = 0; k < points; ++k) {
    peak = std::max(peak, log_density(lo + k * dx));
  }
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double x = lo + k * dx;
    const double w = (k == 0 || k + 1 == points ? 0.5 : 1.0) *
                     std::exp(log_density(x) - peak);
    z += w;
    m1 += w * x;
    m2 += w * x * x;
  }
  GridPosterior out;
  out.mean = m1 / z;
  out.variance = m2 / z - out.mean * out.mean;
  return out;
}

double truthful_utility(const PaymentRule& rule, const PriorModel& prior,
                        std::span<const EffortCostModel> costs, std::size_t i,
                        double xi) {
  const auto& e = rule.entries.at(i);
  if (!e.selected) return -costs[i].envelope_cost(xi);
  // x_hat - y_j = (k - 1) X + k v_i - v_j with k the shrinkage weight.
  const double k = xi / (prior.precision() + xi);
  double gap = (k - 1.0) * (k - 1.0) * prior.variance() +
               1.0 / peer_precision(rule, i);
  if (xi > 0.0) gap += k * k / xi;
  return e.gamma - e.beta * gap - costs[i].envelope_cost(xi);
}

double best_response_effort(const PaymentRule& rule, const PriorModel& prior,
                            std::span<const EffortCostModel> costs,
                            std::size_t i, std::size_t points) {
  const double u = costs[i].xi_u();
  auto f = [&](double xi) { return truthful_utility(rule, prior, costs, i, xi); };
  std::size_t best = 0;
  double best_value = -kInf;
  for (std::size_t k = 0; k < points; ++k) {
    const double v = f(u * k / (points - 1));
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  double a = u * (best == 0 ? 0 : best - 1) / (points - 1);
  double b = u * std::min(best + 1, points - 1) / (points - 1);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int iter = 0; iter < 200 && b - a > 1e-15 * std::max(1.0, u); ++iter) {
    const double c = b - ratio * (b - a);
    const double d = a + ratio * (b - a);
    if (f(c) >= f(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  const double mid = 0.5 * (a + b);
  return f(mid) >= best_value ? mid : u * best / (points - 1);
}

}  // namespace incentive::oracles
