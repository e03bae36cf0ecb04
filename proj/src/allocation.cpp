#include "incentive/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "incentive/errors.hpp"
#include "incentive/rng.hpp"

namespace incentive {
namespace {

AllocationPlan empty_plan(std::size_t n) {
  AllocationPlan plan;
  plan.phi.assign(n, 0);
  plan.xi_tilde.assign(n, 0.0);
  return plan;
}

void require_reachable(const AllocationProblem& problem, double tolerance) {
  const double demand = problem.demand();
  const double reachable = problem.max_precision();
  if (reachable < demand - tolerance * std::max(1.0, demand)) {
    std::ostringstream msg;
    msg << "threshold sigma_t=" << problem.sigma_t
        << " is unreachable: needs added precision " << demand
        << " but the fleet tops out at " << reachable << " (shortfall "
        << demand - reachable << ")";
    throw InfeasibleError(msg.str(), demand - reachable);
  }
}

// Per-agent step lattice shared by both knapsack tables: agent i may take
// up to cap[i] steps of precision unit[i], each costing price[i].
struct Lattice {
  std::vector<double> unit;
  std::vector<double> price;
  std::vector<int> cap;
};

using Counts = std::vector<int>;

double lattice_precision(const Lattice& lattice, const Counts& counts) {
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) total += counts[i] * lattice.unit[i];
  return total;
}

double lattice_cost(const Lattice& lattice, const Counts& counts) {
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) total += counts[i] * lattice.price[i];
  return total;
}

bool meets(double added, double demand) { return added >= demand * (1.0 - 1e-12); }

// Adds the cheapest steps until the real demand is met.
void repair(const Lattice& lattice, Counts& counts, double demand) {
  while (true) {
    const double deficit = demand - lattice_precision(lattice, counts);
    if (meets(demand - deficit, demand)) return;
    std::size_t best = counts.size();
    int best_steps = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const int spare = lattice.cap[i] - counts[i];
      if (spare <= 0) continue;
      const int steps = static_cast<int>(std::min<double>(
          spare, std::ceil(deficit / lattice.unit[i])));
      // Rank partial fills by cost per unit precision.
      const double cost = steps * lattice.price[i] /
                          std::min(1.0, steps * lattice.unit[i] / deficit);
      if (cost < best_cost) {
        best_cost = cost;
        best = i;
        best_steps = steps;
      }
    }
    if (best == counts.size()) return;
    counts[best] += std::max(1, best_steps);
  }
}

// Drops the most expensive removable steps while the demand stays met.
void prune(const Lattice& lattice, Counts& counts, double demand) {
  while (true) {
    const double slack = lattice_precision(lattice, counts) - demand;
    std::size_t best = counts.size();
    int best_steps = 0;
    double best_saving = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] == 0) continue;
      int steps = static_cast<int>(
          std::min<double>(counts[i], std::floor(slack / lattice.unit[i])));
      while (steps > 0) {
        counts[i] -= steps;
        const bool ok = meets(lattice_precision(lattice, counts), demand);
        counts[i] += steps;
        if (ok) break;
        --steps;
      }
      if (steps > 0 && steps * lattice.price[i] > best_saving) {
        best_saving = steps * lattice.price[i];
        best = i;
        best_steps = steps;
      }
    }
    if (best == counts.size()) return;
    counts[best] -= best_steps;
  }
}

// One step out of agent a, the fewest steps of agent b that restore the
// demand in; applied while some exchange lowers the cost.
void exchange(const Lattice& lattice, Counts& counts, double demand) {
  for (std::size_t round = 0; round < 4 * counts.size() + 16; ++round) {
    prune(lattice, counts, demand);
    const double slack = lattice_precision(lattice, counts) - demand;
    std::size_t best_a = counts.size(), best_b = counts.size();
    int best_steps = 0;
    double best_saving = 0.0;
    for (std::size_t a = 0; a < counts.size(); ++a) {
      if (counts[a] == 0) continue;
      const double need = lattice.unit[a] - slack;
      for (std::size_t b = 0; b < counts.size(); ++b) {
        if (b == a) continue;
        const int spare = lattice.cap[b] - counts[b];
        if (spare <= 0) continue;
        const int steps =
            need <= 0.0 ? 0 : static_cast<int>(std::ceil(need / lattice.unit[b]));
        if (steps == 0 || steps > spare) continue;
        const double saving = lattice.price[a] - steps * lattice.price[b];
        if (saving > best_saving + 1e-12 * lattice.price[a]) {
          best_saving = saving;
          best_a = a;
          best_b = b;
          best_steps = steps;
        }
      }
    }
    if (best_a == counts.size()) return;
    counts[best_a] -= 1;
    counts[best_b] += best_steps;
    repair(lattice, counts, demand);
  }
}

// The ceil-rounded table relaxes every real weight upward, so its optimum
// bounds the true optimum from below. When that selection also meets the
// real demand it is optimal outright. Otherwise the floor-rounded selection
// and the repaired relaxed selection are both improved by local exchanges
// and the cheaper one is kept, with the remaining distance to the bound
// reported as the quantization gap.
template <typename Select, typename ToPlan>
AllocationPlan certify(const Lattice& lattice, const CoveringKnapsack& pessimistic,
                       std::int64_t high_cells, const CoveringKnapsack& optimistic,
                       std::int64_t low_cells, const Select& select,
                       const ToPlan& to_plan, double demand) {
  const double bound = optimistic.min_cost(low_cells);
  Counts relaxed = select(optimistic, low_cells);
  Counts safe = select(pessimistic, high_cells);
  if (meets(lattice_precision(lattice, relaxed), demand) &&
      lattice_cost(lattice, relaxed) <= lattice_cost(lattice, safe)) {
    return to_plan(relaxed);
  }
  const double safe_cost = lattice_cost(lattice, safe);
  if (safe_cost <= bound) return to_plan(safe);

  exchange(lattice, safe, demand);
  repair(lattice, relaxed, demand);
  exchange(lattice, relaxed, demand);
  const bool relaxed_ok = meets(lattice_precision(lattice, relaxed), demand);
  Counts& best = relaxed_ok && lattice_cost(lattice, relaxed) < lattice_cost(lattice, safe)
                     ? relaxed
                     : safe;
  AllocationPlan plan = to_plan(best);
  plan.quantization_gap = std::max(0.0, plan.total_cost - bound);
  return plan;
}

double objective(const AllocationProblem& problem, std::span<const double> x) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += problem.costs[i].envelope_cost(x[i]);
  }
  return total;
}

// Euclidean projection onto {0 <= x_i <= upper_i, sum x_i = demand} by
// bisection on the common shift. Returns the lower-shift side so the sum
// never falls short of the demand.
std::vector<double> project(std::span<const double> v,
                            std::span<const double> upper, double demand) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    lo = std::min(lo, v[i] - upper[i]);
    hi = std::max(hi, v[i]);
  }
  auto filled = [&](double shift) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      sum += std::clamp(v[i] - shift, 0.0, upper[i]);
    }
    return sum;
  };
  for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (filled(mid) >= demand) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::vector<double> x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    x[i] = std::clamp(v[i] - lo, 0.0, upper[i]);
  }
  return x;
}

std::vector<double> descend(const AllocationProblem& problem,
                            std::vector<double> start,
                            std::span<const double> upper, double demand) {
  const std::size_t n = start.size();
  std::vector<double> x = project(start, upper, demand);
  double f = objective(problem, x);
  const double scale = *std::max_element(upper.begin(), upper.end());
  std::vector<double> g(n), trial(n), y;

  auto gradient = [&](std::span<const double> at) {
    double largest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = problem.costs[i].derivative(at[i]);
      largest = std::max(largest, std::abs(g[i]));
    }
    return largest;
  };

  double step = scale / (gradient(x) + 1e-300);
  for (int iter = 0; iter < 20000; ++iter) {
    gradient(x);
    double change = 0.0;
    bool accepted = false;
    while (step > 1e-300) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - step * g[i];
      y = project(trial, upper, demand);
      double linear = 0.0, quad = 0.0;
      change = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = y[i] - x[i];
        linear += g[i] * d;
        quad += d * d;
        change = std::max(change, std::abs(d));
      }
      const double fy = objective(problem, y);
      if (fy <= f + linear + quad / (2.0 * step) + 1e-15 * std::abs(f)) {
        accepted = fy <= f;
        if (accepted) {
          x = y;
          f = fy;
        }
        break;
      }
      step *= 0.5;
    }
    if (!accepted || change <= 1e-14 * scale) break;
    step *= 2.0;
  }
  return x;
}

}  // namespace

double AllocationProblem::demand() const {
  return 1.0 / sigma_t - prior.precision();
}

double AllocationProblem::max_precision() const {
  double total = 0.0;
  for (const auto& c : costs) total += c.xi_u();
  return total;
}

void AllocationProblem::validate() const {
  if (!(sigma_t > 0.0) || !std::isfinite(sigma_t)) {
    throw DomainError("MSE threshold sigma_t must be positive and finite");
  }
}

std::size_t AllocationPlan::selected_count() const {
  return static_cast<std::size_t>(std::count(phi.begin(), phi.end(), 1));
}

double AllocationPlan::added_precision() const {
  double total = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (phi[i]) total += xi_tilde[i];
  }
  return total;
}

double AllocationPlan::global_mse(const PriorModel& prior) const {
  return 1.0 / (prior.precision() + added_precision());
}

std::string to_string(Regime regime) {
  return regime == Regime::optimal ? "optimal" : "suboptimal";
}

double plan_cost(const EffortCostModel& model, double xi) {
  if (const auto* d = model.as_discrete()) {
    const double eta = xi * d->sigma2_o;
    const double rounded = std::round(eta);
    if (std::abs(eta - rounded) <= 1e-9 * std::max(1.0, eta)) {
      return rounded * d->c_o;
    }
    return model.envelope_cost(xi);
  }
  return model.cost(xi);
}

AllocationPlan reduce_to_selection(const AllocationProblem& problem,
                                 std::span<const double> xi,
                                 double tolerance) {
  problem.validate();
  const std::size_t n = problem.costs.size();
  if (xi.size() != n) {
    throw DomainError("effort vector length does not match the fleet");
  }
  AllocationPlan plan = empty_plan(n);
  double added = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = problem.costs[i].xi_u();
    if (!(xi[i] >= 0.0) || xi[i] > u * (1.0 + 1e-9)) {
      throw DomainError("effort of agent " + std::to_string(i) +
                        " outside its feasible range");
    }
    if (xi[i] != 0.0) {
      plan.phi[i] = 1;
      plan.xi_tilde[i] = xi[i];
      plan.total_cost += plan_cost(problem.costs[i], xi[i]);
      added += xi[i];
    }
  }
  const double demand = problem.demand();
  if (added < demand - tolerance * std::max(1.0, 1.0 / problem.sigma_t)) {
    std::ostringstream msg;
    msg << "effort vector misses the threshold by " << demand - added;
    throw InfeasibleError(msg.str(), demand - added);
  }
  return plan;
}

AllocationPlan solve_quadratic(const AllocationProblem& problem) {
  problem.validate();
  const std::size_t n = problem.costs.size();
  if (n == 0) {
    if (problem.demand() <= 0.0) return empty_plan(0);
    require_reachable(problem, 0.0);
  }
  const double l = problem.costs.front().quadratic_coefficient();
  for (const auto& c : problem.costs) {
    if (c.kind() != EffortCostModel::Kind::quadratic ||
        std::abs(c.quadratic_coefficient() - l) > 1e-12 * l) {
      throw ConfigError(
          "closed-form quadratic solve needs one shared quadratic coefficient");
    }
  }
  const double demand = problem.demand();
  if (demand <= 0.0) return empty_plan(n);
  require_reachable(problem, 1e-12);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return problem.costs[a].xi_u() < problem.costs[b].xi_u();
  });

  std::vector<double> xi(n, 0.0);
  double remaining = demand;
  std::size_t active = n;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const double share = remaining / static_cast<double>(active);
    if (problem.costs[i].xi_u() < share) {
      xi[i] = problem.costs[i].xi_u();
      remaining -= xi[i];
      --active;
      continue;
    }
    for (std::size_t m = k; m < n; ++m) xi[order[m]] = share;
    break;
  }
  return reduce_to_selection(problem, xi);
}

BoundedKnapsackTable::BoundedKnapsackTable(PriorModel prior,
                                           std::vector<EffortCostModel> costs,
                                           double max_demand,
                                           const SolverOptions& options)
    : prior_(prior),
      costs_(std::move(costs)),
      tolerance_(options.feasibility_tolerance) {
  double min_unit = std::numeric_limits<double>::infinity();
  for (const auto& c : costs_) {
    if (!c.as_discrete()) {
      throw ConfigError("bounded knapsack needs an all-discrete fleet");
    }
    min_unit = std::min(min_unit, c.unit_precision());
  }
  max_demand = std::max(max_demand, 0.0);
  if (costs_.empty()) min_unit = 1.0;

  if (options.bkp_resolution > 0.0) {
    resolution_ = options.bkp_resolution;
    if (resolution_ > min_unit * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "bkp resolution " << resolution_
          << " is coarser than the smallest reading precision " << min_unit;
      throw ConfigError(msg.str());
    }
  } else {
    resolution_ = min_unit / 64.0;
    if (max_demand / resolution_ > static_cast<double>(options.bkp_max_cells)) {
      resolution_ = max_demand / static_cast<double>(options.bkp_max_cells);
    }
    if (resolution_ > min_unit * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "bkp_max_cells=" << options.bkp_max_cells
          << " forces a cell of " << resolution_
          << ", coarser than the smallest reading precision " << min_unit;
      throw ConfigError(msg.str());
    }
  }

  std::vector<KnapsackItem> pessimistic, optimistic;
  for (std::size_t i = 0; i < costs_.size(); ++i) {
    const auto* d = costs_[i].as_discrete();
    for (int bundle : binary_bundles(d->eta_max)) {
      const double precision = bundle / d->sigma2_o;
      const double cost = bundle * d->c_o;
      pessimistic.push_back(
          {to_cells(precision, resolution_, CellRounding::down), cost, i,
           bundle});
      optimistic.push_back(
          {to_cells(precision, resolution_, CellRounding::up), cost, i, bundle});
    }
  }
  table_ = std::make_unique<CoveringKnapsack>(
      std::move(pessimistic),
      to_cells(max_demand, resolution_, CellRounding::up));
  optimistic_ = std::make_unique<CoveringKnapsack>(
      std::move(optimistic),
      to_cells(max_demand, resolution_, CellRounding::down));
}

AllocationPlan BoundedKnapsackTable::plan_for(double sigma_t) const {
  AllocationProblem problem{prior_, {}, sigma_t};
  problem.validate();
  const double demand = problem.demand();
  AllocationPlan plan = empty_plan(costs_.size());
  if (demand <= 0.0) return plan;

  double reachable = 0.0;
  for (const auto& c : costs_) reachable += c.xi_u();
  if (reachable < demand - tolerance_ * std::max(1.0, demand)) {
    std::ostringstream msg;
    msg << "threshold sigma_t=" << sigma_t << " is unreachable (shortfall "
        << demand - reachable << ")";
    throw InfeasibleError(msg.str(), demand - reachable);
  }
  const std::int64_t cells = to_cells(demand, resolution_, CellRounding::up);
  if (cells > table_->capacity()) {
    throw InvariantError("threshold beyond the knapsack table's demand range");
  }
  if (!std::isfinite(table_->min_cost(cells))) {
    std::ostringstream msg;
    msg << "threshold sigma_t=" << sigma_t
        << " is only reachable below the DP resolution " << resolution_;
    throw InfeasibleError(msg.str(), 0.0);
  }

  Lattice lattice;
  for (const auto& c : costs_) {
    const auto* d = c.as_discrete();
    lattice.unit.push_back(1.0 / d->sigma2_o);
    lattice.price.push_back(d->c_o);
    lattice.cap.push_back(d->eta_max);
  }
  auto select = [&](const CoveringKnapsack& table, std::int64_t at) {
    Counts counts(costs_.size(), 0);
    for (std::size_t k : table.selection(at)) {
      const auto& item = table.items()[k];
      counts[item.owner] += item.count;
    }
    return counts;
  };
  auto to_plan = [&](const Counts& counts) {
    AllocationPlan candidate = empty_plan(costs_.size());
    for (std::size_t i = 0; i < costs_.size(); ++i) {
      if (counts[i] == 0) continue;
      const auto* d = costs_[i].as_discrete();
      candidate.phi[i] = 1;
      candidate.xi_tilde[i] = counts[i] / d->sigma2_o;
      candidate.total_cost += counts[i] * d->c_o;
    }
    return candidate;
  };
  return certify(lattice, *table_, cells, *optimistic_,
                 to_cells(demand, resolution_, CellRounding::down), select,
                 to_plan, demand);
}

BinaryKnapsackTable::BinaryKnapsackTable(PriorModel prior,
                                         std::vector<EffortCostModel> costs,
                                         double max_demand,
                                         const SolverOptions& options)
    : prior_(prior),
      costs_(std::move(costs)),
      scale_(options.kp_scale),
      tolerance_(options.feasibility_tolerance) {
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) {
    throw ConfigError("kp_scale must be positive");
  }
  const double resolution = 1.0 / scale_;
  max_demand = std::max(max_demand, 0.0);
  std::vector<KnapsackItem> pessimistic, optimistic;
  for (std::size_t i = 0; i < costs_.size(); ++i) {
    const double xi_u = costs_[i].xi_u();
    const double c_u = costs_[i].c_u();
    pessimistic.push_back(
        {to_cells(xi_u, resolution, CellRounding::down), c_u, i, 1});
    optimistic.push_back(
        {to_cells(xi_u, resolution, CellRounding::up), c_u, i, 1});
  }
  const double cells = std::ceil(max_demand * scale_);
  if (cells > static_cast<double>(CoveringKnapsack::kMaxCells)) {
    std::ostringstream msg;
    msg << "kp_scale=" << scale_ << " needs " << cells
        << " DP cells; use a coarser scale";
    throw ConfigError(msg.str());
  }
  table_ = std::make_unique<CoveringKnapsack>(
      std::move(pessimistic), to_cells(max_demand, resolution, CellRounding::up));
  optimistic_ = std::make_unique<CoveringKnapsack>(
      std::move(optimistic),
      to_cells(max_demand, resolution, CellRounding::down));
}

AllocationPlan BinaryKnapsackTable::plan_for(double sigma_t) const {
  AllocationProblem problem{prior_, {}, sigma_t};
  problem.validate();
  const double demand = problem.demand();
  AllocationPlan plan = empty_plan(costs_.size());
  if (demand <= 0.0) return plan;

  double reachable = 0.0;
  for (const auto& c : costs_) reachable += c.xi_u();
  if (reachable < demand - tolerance_ * std::max(1.0, demand)) {
    std::ostringstream msg;
    msg << "threshold sigma_t=" << sigma_t << " is unreachable (shortfall "
        << demand - reachable << ")";
    throw InfeasibleError(msg.str(), demand - reachable);
  }
  const double resolution = 1.0 / scale_;
  const std::int64_t cells = to_cells(demand, resolution, CellRounding::up);
  if (cells > table_->capacity()) {
    throw InvariantError("threshold beyond the knapsack table's demand range");
  }
  if (!std::isfinite(table_->min_cost(cells))) {
    std::ostringstream msg;
    msg << "threshold sigma_t=" << sigma_t
        << " is only reachable below the DP scale " << scale_;
    throw InfeasibleError(msg.str(), 0.0);
  }
  Lattice lattice;
  for (const auto& c : costs_) {
    lattice.unit.push_back(c.xi_u());
    lattice.price.push_back(c.c_u());
    lattice.cap.push_back(1);
  }
  auto select = [&](const CoveringKnapsack& table, std::int64_t at) {
    Counts counts(costs_.size(), 0);
    for (std::size_t k : table.selection(at)) counts[table.items()[k].owner] = 1;
    return counts;
  };
  auto to_plan = [&](const Counts& counts) {
    AllocationPlan candidate = empty_plan(costs_.size());
    for (std::size_t i = 0; i < costs_.size(); ++i) {
      if (counts[i] == 0) continue;
      candidate.phi[i] = 1;
      candidate.xi_tilde[i] = costs_[i].xi_u();
      candidate.total_cost += costs_[i].c_u();
    }
    return candidate;
  };
  return certify(lattice, *table_, cells, *optimistic_,
                 to_cells(demand, resolution, CellRounding::down), select,
                 to_plan, demand);
}

AllocationPlan solve_bkp(const AllocationProblem& problem,
                         const SolverOptions& options) {
  problem.validate();
  const double demand = problem.demand();
  if (demand <= 0.0) {
    for (const auto& c : problem.costs) {
      if (!c.as_discrete()) {
        throw ConfigError("bounded knapsack needs an all-discrete fleet");
      }
    }
    return empty_plan(problem.costs.size());
  }
  require_reachable(problem, options.feasibility_tolerance);
  BoundedKnapsackTable table(problem.prior, problem.costs, demand, options);
  return table.plan_for(problem.sigma_t);
}

AllocationPlan solve_binary_kp(const AllocationProblem& problem,
                               const SolverOptions& options) {
  problem.validate();
  const double demand = problem.demand();
  if (demand <= 0.0) return empty_plan(problem.costs.size());
  require_reachable(problem, options.feasibility_tolerance);
  BinaryKnapsackTable table(problem.prior, problem.costs, demand, options);
  return table.plan_for(problem.sigma_t);
}

AllocationPlan solve_continuous(const AllocationProblem& problem,
                                const SolverOptions& options) {
  problem.validate();
  const std::size_t n = problem.costs.size();
  const double demand = problem.demand();
  if (demand <= 0.0) return empty_plan(n);
  require_reachable(problem, options.feasibility_tolerance);

  std::vector<double> upper(n);
  for (std::size_t i = 0; i < n; ++i) upper[i] = problem.costs[i].xi_u();
  // Saturated fleet: the only feasible point is everyone at xi_iu.
  if (problem.max_precision() <= demand) {
    return reduce_to_selection(problem, upper, options.feasibility_tolerance);
  }

  const int starts = std::max(1, options.descent_starts);
  std::vector<double> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    std::vector<double> start(n);
    if (s == 0) {
      std::fill(start.begin(), start.end(), demand / static_cast<double>(n));
    } else {
      Substream rng(options.descent_seed, static_cast<std::uint64_t>(s), 0);
      for (std::size_t i = 0; i < n; ++i) start[i] = rng.uniform() * upper[i];
    }
    auto x = descend(problem, std::move(start), upper, demand);
    const double value = objective(problem, x);
    if (value < best_value) {
      best_value = value;
      best = std::move(x);
    }
  }
  return reduce_to_selection(problem, best, options.feasibility_tolerance);
}

bool all_realizable(const AllocationProblem& problem,
                    const SolverOptions& options) {
  return std::all_of(problem.costs.begin(), problem.costs.end(),
                     [&](const EffortCostModel& c) {
                       return realizability_holds(c, problem.prior.precision(),
                                                  options.realizability_grid);
                     });
}

Solution solve(const AllocationProblem& problem, const SolverOptions& options) {
  problem.validate();
  if (!all_realizable(problem, options)) {
    return {solve_binary_kp(problem, options), Regime::suboptimal};
  }
  const auto& costs = problem.costs;
  const bool all_discrete =
      !costs.empty() && std::all_of(costs.begin(), costs.end(), [](auto& c) {
        return c.kind() == EffortCostModel::Kind::discrete_linear;
      });
  const bool shared_quadratic =
      !costs.empty() && std::all_of(costs.begin(), costs.end(), [&](auto& c) {
        return c.kind() == EffortCostModel::Kind::quadratic &&
               std::abs(c.quadratic_coefficient() -
                        costs.front().quadratic_coefficient()) <=
                   1e-12 * costs.front().quadratic_coefficient();
      });
  if (shared_quadratic) return {solve_quadratic(problem), Regime::optimal};
  if (all_discrete) return {solve_bkp(problem, options), Regime::optimal};
  return {solve_continuous(problem, options), Regime::optimal};
}

}  // namespace incentive
