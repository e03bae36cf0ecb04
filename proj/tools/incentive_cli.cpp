// Command-line front end for planning, calibrating, simulating and verifying
// incentive mechanisms.
//
// Exit codes: 0 success, 2 infeasible threshold, 3 configuration error,
// 4 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "incentive/config.hpp"
#include "incentive/errors.hpp"
#include "incentive/experiment.hpp"
#include "incentive/oracles.hpp"
#include "incentive/rng.hpp"

namespace {

using namespace incentive;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitConfig = 3;
constexpr int kExitVerification = 4;

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> trials;
  std::optional<int> jobs;
  std::string rule_path;
  std::string rules_out;
  std::optional<double> sigma_t;
};

ExperimentConfig load(const GlobalFlags& flags) {
  if (flags.config_path.empty()) throw ConfigError("--config is required");
  ExperimentConfig cfg = load_config(flags.config_path);
  if (flags.seed) cfg.seed = flags.seed;
  if (flags.trials) cfg.trials = *flags.trials;
  if (flags.jobs) cfg.jobs = *flags.jobs;
  if (flags.sigma_t) cfg.sigma_t = flags.sigma_t;
  return cfg;
}

void emit(const GlobalFlags& flags, const std::string& text) {
  if (flags.out.empty() || flags.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(flags.out, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + flags.out + "'");
  out << text;
}

std::string num(double v) { return format_number(v); }

AllocationProblem problem_for(const ExperimentConfig& cfg) {
  if (!cfg.sigma_t) throw ConfigError("no threshold: set [problem] sigma_t");
  return {cfg.prior(), cfg.fleet(), *cfg.sigma_t};
}

Solution plan_problem(const ExperimentConfig& cfg) {
  return solve_with(problem_for(cfg), cfg.method, cfg.solver);
}

PaymentRule calibrated_rule(const ExperimentConfig& cfg,
                            const std::vector<EffortCostModel>& fleet,
                            const GlobalFlags& flags) {
  if (!flags.rule_path.empty()) {
    std::ifstream in(flags.rule_path);
    if (!in) throw ConfigError("cannot open rule file '" + flags.rule_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    PaymentRule rule = parse_rule(buffer.str());
    if (rule.size() != fleet.size()) {
      throw ConfigError("rule covers a different number of agents than the config");
    }
    return rule;
  }
  const Solution s = plan_problem(cfg);
  return s.regime == Regime::optimal
             ? calibrate_m1(cfg.prior(), fleet, s.plan, cfg.mechanism)
             : calibrate_m2(cfg.prior(), fleet, s.plan, cfg.mechanism);
}

StrategyProfile candidate_profile(const ExperimentConfig& cfg,
                                  const PaymentRule& rule) {
  StrategyProfile profile = equilibrium_profile(rule);
  for (const auto& [i, strategy] : cfg.profile_overrides) {
    if (i >= profile.size()) {
      throw ConfigError("[profile] names agent " + std::to_string(i) +
                        " outside the fleet");
    }
    profile[i] = strategy;
  }
  return profile;
}

int cmd_solve(const GlobalFlags& flags) {
  const ExperimentConfig cfg = load(flags);
  const AllocationProblem problem = problem_for(cfg);
  const Solution s = solve_with(problem, cfg.method, cfg.solver);
  std::ostringstream out;
  out << "regime " << to_string(s.regime) << "\n";
  out << "total_payment " << num(s.plan.total_cost) << "\n";
  out << "selected " << s.plan.selected_count() << "\n";
  out << "global_mse " << num(s.plan.global_mse(problem.prior)) << "\n";
  if (s.plan.quantization_gap > 0.0) {
    out << "quantization_gap " << num(s.plan.quantization_gap) << "\n";
  }
  for (std::size_t i = 0; i < s.plan.size(); ++i) {
    if (!s.plan.phi[i]) continue;
    out << "agent " << i << " xi " << num(s.plan.xi_tilde[i]) << " cost "
        << num(plan_cost(problem.costs[i], s.plan.xi_tilde[i])) << "\n";
  }
  emit(flags, out.str());
  return kExitOk;
}

int cmd_calibrate(const GlobalFlags& flags) {
  const ExperimentConfig cfg = load(flags);
  const auto fleet = cfg.fleet();
  emit(flags, dump_rule(calibrated_rule(cfg, fleet, flags)));
  return kExitOk;
}

MonteCarloOptions mc_options(const ExperimentConfig& cfg) {
  if (cfg.trials == 0) throw ConfigError("set trials (config or --trials)");
  return {cfg.trials, cfg.require_seed(), cfg.jobs};
}

int cmd_simulate(const GlobalFlags& flags) {
  const ExperimentConfig cfg = load(flags);
  const auto fleet = cfg.fleet();
  const Game game{cfg.prior(), fleet, calibrated_rule(cfg, fleet, flags)};
  const StrategyProfile profile = candidate_profile(cfg, game.rule);
  const MonteCarloOptions mc = mc_options(cfg);

  std::ostringstream out;
  out << "agent,xi,payment,payment_se,utility,utility_se\n";
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    if (!game.rule.entries[i].selected && profile[i].xi == 0.0) continue;
    const AgentOutcome o = simulate_agent(game, profile, i, mc);
    out << i << ',' << num(profile[i].xi) << ',' << num(o.payment.mean) << ','
        << num(o.payment.standard_error) << ',' << num(o.utility.mean) << ','
        << num(o.utility.standard_error) << "\n";
  }
  const AllocationPlan plan = plan_from_rule(game.rule, fleet);
  const Estimate mse = realized_global_error(profile, plan, game.prior, mc);
  out << "# empirical_mse " << num(mse.mean) << " se "
      << num(mse.standard_error) << " analytic " << num(plan.global_mse(game.prior))
      << "\n";
  emit(flags, out.str());
  return kExitOk;
}

int cmd_verify(const GlobalFlags& flags, bool dominance) {
  const ExperimentConfig cfg = load(flags);
  const auto fleet = cfg.fleet();
  const Game game{cfg.prior(), fleet, calibrated_rule(cfg, fleet, flags)};
  const StrategyProfile candidate = candidate_profile(cfg, game.rule);
  const MonteCarloOptions mc = mc_options(cfg);

  std::ostringstream out;
  bool failed = false;
  out << "agent,best_found_gain,standard_error,verdict,best_xi,best_policy\n";
  for (const auto& r : verify_equilibrium(game, candidate, cfg.grid, mc)) {
    failed |= r.verdict == Verdict::profitable_deviation_found;
    out << r.agent << ',' << num(r.best_found_gain) << ','
        << num(r.standard_error) << ',' << to_string(r.verdict) << ','
        << num(r.best_xi) << ',' << r.best_policy.name() << "\n";
  }
  if (dominance) {
    // Opponents that shirk entirely or report a shifted, inflated estimate.
    std::vector<StrategyProfile> adversarial(2, candidate);
    for (auto& s : adversarial[0]) s = {0.0, ReportPolicy::constant(0.0),
                                        ReportPolicy::constant(0.0)};
    for (auto& s : adversarial[1]) {
      s.estimate = ReportPolicy::affine(2.0, 1.0);
      s.measurement = ReportPolicy::affine(2.0, 1.0);
    }
    const auto dominant =
        verify_dominance(game, candidate, adversarial, cfg.grid, mc);
    for (std::size_t i = 0; i < dominant.size(); ++i) {
      if (!game.rule.entries[i].selected) continue;
      failed |= !dominant[i];
      out << "# dominance agent " << i << ' '
          << (dominant[i] ? "holds" : "violated") << "\n";
    }
  }
  emit(flags, out.str());
  return failed ? kExitVerification : kExitOk;
}

int cmd_sweep(const GlobalFlags& flags) {
  const ExperimentConfig cfg = load(flags);
  const RunRecord record = run_sweep(cfg);
  emit(flags, to_csv(record));
  if (!flags.rules_out.empty()) {
    std::ofstream rules(flags.rules_out, std::ios::binary);
    if (!rules) throw ConfigError("cannot write '" + flags.rules_out + "'");
    rules << dump_rules(record);
  }
  return record.any_profitable_deviation() ? kExitVerification : kExitOk;
}

int cmd_oracle(const GlobalFlags& flags, std::size_t instances) {
  const std::uint64_t seed = flags.seed.value_or(1);
  std::size_t mismatches = 0;
  std::ostringstream out;
  const PriorModel prior = PriorModel::from_precision(1.0 / 64.0);

  for (std::size_t k = 0; k < instances; ++k) {
    Substream rng(seed, k, 0xB1);
    // Dyadic weights keep the DP grid exact.
    const std::size_t n = 2 + (rng() % 11);
    std::vector<EffortCostModel> fleet;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi_u = static_cast<double>(1 + rng() % 64) / 64.0;
      fleet.push_back(EffortCostModel::discrete_linear(
          1.0 / xi_u, static_cast<double>(1 + rng() % 50), 1));
      total += xi_u;
    }
    const double demand = total * rng.uniform();
    const AllocationProblem p{prior, fleet,
                              1.0 / (prior.precision() + demand)};
    SolverOptions options;
    options.kp_scale = 64.0;
    const auto expect = oracles::binary_knapsack(p);
    const auto got = solve_binary_kp(p, options);
    if (got.total_cost != expect.cost) ++mismatches;
  }
  out << "binary_knapsack instances " << instances << "\n";

  for (std::size_t k = 0; k < instances; ++k) {
    Substream rng(seed, k, 0xB2);
    const std::size_t n = 1 + (rng() % 4);
    std::vector<EffortCostModel> fleet;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int eta = 1 + static_cast<int>(rng() % 4);
      const double unit = static_cast<double>(1 + rng() % 16) / 64.0;
      fleet.push_back(EffortCostModel::discrete_linear(
          1.0 / unit, static_cast<double>(1 + rng() % 20), eta));
      total += eta * unit;
    }
    const double demand = total * rng.uniform();
    const AllocationProblem p{prior, fleet,
                              1.0 / (prior.precision() + demand)};
    SolverOptions options;
    options.bkp_resolution = 1.0 / 64.0;
    const auto expect = oracles::bounded_knapsack(p);
    const auto got = solve_bkp(p, options);
    if (got.total_cost != expect.cost) ++mismatches;
  }
  out << "bounded_knapsack instances " << instances << "\n";
  out << "mismatches " << mismatches << "\n";
  emit(flags, out.str());
  return mismatches == 0 ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incentive mechanism planner and equilibrium checker"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  int jobs = 0;
  double sigma_t = 0.0;
  app.add_option("--config", flags.config_path, "Experiment config file");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", flags.out, "Output file (default stdout)");
  auto* trials_opt = app.add_option("--trials", trials, "Monte Carlo trials");
  auto* jobs_opt = app.add_option("--jobs", jobs, "Worker threads");

  auto* solve = app.add_subcommand("solve", "Solve one allocation problem");
  auto* calibrate = app.add_subcommand("calibrate", "Print the payment rule");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo payments and utilities");
  auto* verify = app.add_subcommand("verify", "Search for profitable deviations");
  auto* sweep = app.add_subcommand("sweep", "Threshold sweep to CSV");
  auto* oracle = app.add_subcommand("oracle", "Knapsack brute-force cross-checks");

  for (auto* sub : {solve, calibrate, simulate, verify}) {
    sub->add_option("--sigma-t", sigma_t, "Global MSE threshold");
  }
  for (auto* sub : {simulate, verify}) {
    sub->add_option("--rule", flags.rule_path, "Payment rule dump to load");
  }
  bool dominance = false;
  verify->add_flag("--dominance", dominance,
                   "Also test dominance against adversarial opponents");
  sweep->add_option("--rules", flags.rules_out, "Write calibrated rules here");
  std::size_t instances = 200;
  oracle->add_option("--instances", instances, "Random instances per solver");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (seed_opt->count()) flags.seed = seed;
  if (trials_opt->count()) flags.trials = trials;
  if (jobs_opt->count()) flags.jobs = jobs;
  for (auto* sub : {solve, calibrate, simulate, verify}) {
    if (sub->count("--sigma-t")) flags.sigma_t = sigma_t;
  }

  try {
    if (*solve) return cmd_solve(flags);
    if (*calibrate) return cmd_calibrate(flags);
    if (*simulate) return cmd_simulate(flags);
    if (*verify) return cmd_verify(flags, dominance);
    if (*sweep) return cmd_sweep(flags);
    if (*oracle) return cmd_oracle(flags, instances);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << " (shortfall " << e.shortfall()
              << ")\n";
    return kExitInfeasible;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PairingError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
