#include "incentive/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <sstream>

#include "incentive/errors.hpp"
#include "incentive/rng.hpp"

namespace incentive {
namespace {

constexpr std::uint64_t kMseTrial = 0x4D5345;
constexpr std::uint64_t kVerifyTrial = 0x564552;

struct RowTask {
  double sigma_t;
  Regime regime;
};

bool all_discrete(const std::vector<EffortCostModel>& fleet) {
  return std::all_of(fleet.begin(), fleet.end(),
                     [](const auto& c) { return c.as_discrete() != nullptr; });
}

StrategyProfile truthful_profile(const AllocationPlan& plan) {
  StrategyProfile profile(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    profile[i].xi = plan.phi[i] ? plan.xi_tilde[i] : 0.0;
  }
  return profile;
}

}  // namespace

bool RunRecord::any_profitable_deviation() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) {
    return r.verdict == to_string(Verdict::profitable_deviation_found);
  });
}

Solution solve_with(const AllocationProblem& problem, SolverChoice choice,
                    const SolverOptions& options) {
  switch (choice) {
    case SolverChoice::automatic:
      return solve(problem, options);
    case SolverChoice::quadratic:
      return {solve_quadratic(problem), Regime::optimal};
    case SolverChoice::bkp:
      return {solve_bkp(problem, options), Regime::optimal};
    case SolverChoice::binary:
      return {solve_binary_kp(problem, options), Regime::suboptimal};
    case SolverChoice::continuous:
      return {solve_continuous(problem, options), Regime::optimal};
  }
  return solve(problem, options);
}

RunRecord run_sweep(const ExperimentConfig& config) {
  const std::uint64_t seed = config.require_seed();
  const std::vector<EffortCostModel> fleet = config.fleet();
  const PriorModel prior = config.prior();

  std::vector<double> thresholds = config.sweep_sigma_t;
  if (thresholds.empty() && config.sigma_t) thresholds.push_back(*config.sigma_t);
  if (thresholds.empty()) throw ConfigError("nothing to sweep: no sigma_t given");
  std::sort(thresholds.begin(), thresholds.end());
  if (config.verify && config.trials == 0) {
    throw ConfigError("verification needs trials > 0");
  }

  const bool realizable =
      all_realizable(AllocationProblem{prior, fleet, thresholds.front()},
                     config.solver);
  Regime automatic_regime = realizable ? Regime::optimal : Regime::suboptimal;
  if (config.method == SolverChoice::binary) automatic_regime = Regime::suboptimal;
  if (config.method != SolverChoice::automatic &&
      config.method != SolverChoice::binary) {
    automatic_regime = Regime::optimal;
  }

  std::vector<RowTask> tasks;
  for (double s : thresholds) {
    switch (config.mode) {
      case SweepMode::automatic:
        tasks.push_back({s, automatic_regime});
        break;
      case SweepMode::optimal:
        tasks.push_back({s, Regime::optimal});
        break;
      case SweepMode::suboptimal:
        tasks.push_back({s, Regime::suboptimal});
        break;
      case SweepMode::paired:
        tasks.push_back({s, Regime::optimal});
        tasks.push_back({s, Regime::suboptimal});
        break;
    }
  }

  double reachable = 0.0;
  for (const auto& c : fleet) reachable += c.xi_u();
  const double max_demand =
      std::min(AllocationProblem{prior, {}, thresholds.front()}.demand(),
               reachable);
  const bool wants_optimal = std::any_of(tasks.begin(), tasks.end(), [](auto& t) {
    return t.regime == Regime::optimal;
  });
  const bool wants_binary = std::any_of(tasks.begin(), tasks.end(), [](auto& t) {
    return t.regime == Regime::suboptimal;
  });

  std::unique_ptr<BoundedKnapsackTable> bkp_table;
  std::unique_ptr<BinaryKnapsackTable> binary_table;
  if (max_demand > 0.0 && wants_optimal && all_discrete(fleet) &&
      (config.method == SolverChoice::automatic ||
       config.method == SolverChoice::bkp)) {
    bkp_table = std::make_unique<BoundedKnapsackTable>(prior, fleet, max_demand,
                                                       config.solver);
  }
  if (max_demand > 0.0 && wants_binary) {
    binary_table = std::make_unique<BinaryKnapsackTable>(prior, fleet,
                                                         max_demand, config.solver);
  }
  SolverChoice optimal_method = config.method;
  if (optimal_method == SolverChoice::binary ||
      optimal_method == SolverChoice::automatic) {
    optimal_method = SolverChoice::automatic;
  }

  RunRecord record;
  record.config_snapshot = config.snapshot();
  record.rows.resize(tasks.size());
  const int inner_jobs = tasks.size() == 1 ? config.jobs : 1;

  parallel_for(tasks.size(), config.jobs, [&](std::size_t k) {
    const RowTask& task = tasks[k];
    SweepRow& row = record.rows[k];
    row.sigma_t = task.sigma_t;
    row.regime = task.regime;
    const AllocationProblem problem{prior, fleet, task.sigma_t};

    try {
      if (task.regime == Regime::suboptimal) {
        row.plan = binary_table ? binary_table->plan_for(task.sigma_t)
                                : solve_binary_kp(problem, config.solver);
      } else if (bkp_table) {
        row.plan = bkp_table->plan_for(task.sigma_t);
      } else {
        Solution solution = solve_with(problem, optimal_method, config.solver);
        if (config.mode == SweepMode::automatic) row.regime = solution.regime;
        if (solution.regime != task.regime && config.mode != SweepMode::automatic) {
          // The generic dispatcher fell back; keep the optimal-problem answer.
          solution = solve_with(problem,
                                all_discrete(fleet) ? SolverChoice::bkp
                                                    : SolverChoice::continuous,
                                config.solver);
        }
        row.plan = std::move(solution.plan);
      }
    } catch (const InfeasibleError&) {
      row.feasible = false;
      row.verdict = "infeasible";
      return;
    }
    row.total_payment = row.plan.total_cost;
    row.selected = row.plan.selected_count();

    try {
      row.rule = row.regime == Regime::optimal
                     ? calibrate_m1(prior, fleet, row.plan, config.mechanism)
                     : calibrate_m2(prior, fleet, row.plan, config.mechanism);
    } catch (const PairingError&) {
      row.verdict = "unpaired";
    }

    if (config.trials > 0) {
      row.empirical_mse = realized_global_error(
          truthful_profile(row.plan), row.plan, prior,
          {config.trials, derive_seed(seed, k, kMseTrial), inner_jobs});
    }
    if (config.verify && row.rule) {
      const Game game{prior, fleet, *row.rule};
      StrategyProfile candidate = equilibrium_profile(*row.rule);
      for (const auto& [i, strategy] : config.profile_overrides) {
        if (i < candidate.size()) candidate[i] = strategy;
      }
      row.deviations = verify_equilibrium(
          game, candidate, config.grid,
          {config.trials, derive_seed(seed, k, kVerifyTrial), inner_jobs});
      const bool found = std::any_of(
          row.deviations.begin(), row.deviations.end(), [](const auto& d) {
            return d.verdict == Verdict::profitable_deviation_found;
          });
      row.verdict = to_string(found ? Verdict::profitable_deviation_found
                                    : Verdict::no_profitable_deviation);
    }
  });
  return record;
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.9g", value);
  return buffer;
}

std::string to_csv(const RunRecord& record) {
  std::ostringstream out;
  out << "sigma_t,regime,total_payment,selected,empirical_mse,verdict\n";
  for (const auto& row : record.rows) {
    out << format_number(row.sigma_t) << ',' << to_string(row.regime) << ',';
    if (row.feasible) {
      out << format_number(row.total_payment) << ',' << row.selected;
    } else {
      out << ',';
    }
    out << ',';
    if (row.empirical_mse) out << format_number(row.empirical_mse->mean);
    out << ',' << row.verdict << '\n';
  }
  return out.str();
}

std::string dump_rules(const RunRecord& record) {
  std::ostringstream out;
  for (std::size_t k = 0; k < record.rows.size(); ++k) {
    const auto& row = record.rows[k];
    if (!row.rule) continue;
    char sigma[64];
    std::snprintf(sigma, sizeof sigma, "%.17g", row.sigma_t);
    out << "row " << k << " sigma_t " << sigma << " regime "
        << to_string(row.regime) << "\n"
        << dump_rule(*row.rule);
  }
  return out.str();
}

std::vector<RuleBlock> parse_rules(std::string_view text) {
  std::vector<RuleBlock> blocks;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = text.find("row ", pos);
    if (start == std::string_view::npos) break;
    const std::size_t header_end = text.find('\n', start);
    if (header_end == std::string_view::npos) {
      throw ConfigError("truncated rules file");
    }
    std::size_t next = text.find("\nrow ", header_end);
    next = next == std::string_view::npos ? text.size() : next + 1;

    RuleBlock block;
    std::istringstream header{
        std::string(text.substr(start, header_end - start))};
    std::string row_key, sigma_key, regime_key, regime;
    if (!(header >> row_key >> block.row >> sigma_key >> block.sigma_t >>
          regime_key >> regime) ||
        sigma_key != "sigma_t" || regime_key != "regime") {
      throw ConfigError("malformed rule block header");
    }
    if (regime == "optimal") {
      block.regime = Regime::optimal;
    } else if (regime == "suboptimal") {
      block.regime = Regime::suboptimal;
    } else {
      throw ConfigError("unknown regime '" + regime + "' in rules file");
    }
    block.rule = parse_rule(text.substr(header_end + 1, next - header_end - 1));
    blocks.push_back(std::move(block));
    pos = next;
  }
  return blocks;
}

AllocationPlan plan_from_rule(const PaymentRule& rule,
                              std::span<const EffortCostModel> costs) {
  if (costs.size() != rule.size()) {
    throw DomainError("rule and fleet sizes differ");
  }
  AllocationPlan plan;
  plan.phi.assign(rule.size(), 0);
  plan.xi_tilde.assign(rule.size(), 0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    if (!rule.entries[i].selected) continue;
    plan.phi[i] = 1;
    plan.xi_tilde[i] = rule.entries[i].xi_target;
    plan.total_cost += plan_cost(costs[i], plan.xi_tilde[i]);
  }
  return plan;
}

}  // namespace incentive
