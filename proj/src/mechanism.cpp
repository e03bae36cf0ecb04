#include "incentive/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "incentive/errors.hpp"

namespace incentive {
namespace {

void check_pairing(const AllocationPlan& plan,
                   std::span<const std::size_t> pairing,
                   const MechanismOptions& options) {
  const std::size_t n = plan.size();
  if (pairing.size() != n) {
    throw PairingError("pairing length does not match the plan");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!plan.phi[i]) continue;
    const std::size_t j = pairing[i];
    if (j == kHonestPeer) {
      if (!options.honest_xi || !(*options.honest_xi > 0.0)) {
        throw PairingError("agent " + std::to_string(i) +
                           " is paired with an honest agent that is not "
                           "configured");
      }
      continue;
    }
    if (j >= n || j == i) {
      throw PairingError("agent " + std::to_string(i) +
                         " needs a peer other than itself");
    }
    if (!plan.phi[j] || !(plan.xi_tilde[j] > 0.0)) {
      throw PairingError("peer " + std::to_string(j) + " of agent " +
                         std::to_string(i) + " is not a selected agent");
    }
  }
}

double peer_precision(const AllocationPlan& plan, std::size_t peer,
                      const MechanismOptions& options) {
  return peer == kHonestPeer ? *options.honest_xi : plan.xi_tilde[peer];
}

PaymentRule blank_rule(MechanismKind kind, const PriorModel& prior,
                       std::size_t n, const MechanismOptions& options) {
  PaymentRule rule;
  rule.kind = kind;
  rule.prior_precision = prior.precision();
  rule.honest_xi = options.honest_xi;
  rule.entries.resize(n);
  return rule;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace

std::string to_string(MechanismKind kind) {
  return kind == MechanismKind::m1 ? "M1" : "M2";
}

double PaymentRule::pay(std::size_t i, double x_hat_r, double y_r_peer) const {
  const auto& e = entries.at(i);
  if (!e.selected) return 0.0;
  const double gap = x_hat_r - y_r_peer;
  return e.gamma - e.beta * gap * gap;
}

double payment(const PaymentRule& rule, const ReportProfile& reports,
               std::size_t i) {
  const auto& e = rule.entries.at(i);
  if (!e.selected) return 0.0;
  double peer_y = 0.0;
  if (e.peer == kHonestPeer) {
    if (!reports.honest_y) {
      throw InvariantError("rule needs the honest agent's measurement");
    }
    peer_y = *reports.honest_y;
  } else {
    peer_y = reports.agents.at(e.peer).y_r;
  }
  return rule.pay(i, reports.agents.at(i).x_hat_r, peer_y);
}

std::vector<std::size_t> cycle_pairing(const AllocationPlan& plan,
                                       bool use_honest_agent) {
  const std::size_t n = plan.size();
  std::vector<std::size_t> pairing(n, kHonestPeer);
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < n; ++i) {
    if (plan.phi[i]) selected.push_back(i);
  }
  if (use_honest_agent) return pairing;
  for (std::size_t k = 0; k < selected.size(); ++k) {
    // A lone selected agent pairs with itself, which check_pairing rejects.
    pairing[selected[k]] = selected[(k + 1) % selected.size()];
  }
  return pairing;
}

PaymentRule calibrate_m1(const PriorModel& prior,
                         std::span<const EffortCostModel> costs,
                         const AllocationPlan& plan,
                         std::span<const std::size_t> pairing,
                         const MechanismOptions& options) {
  if (costs.size() != plan.size()) {
    throw InvariantError("plan and fleet sizes differ");
  }
  check_pairing(plan, pairing, options);
  const double xi_x = prior.precision();
  PaymentRule rule = blank_rule(MechanismKind::m1, prior, plan.size(), options);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!plan.phi[i]) continue;
    const double xi = plan.xi_tilde[i];
    auto& e = rule.entries[i];
    e.selected = true;
    e.peer = pairing[i];
    e.xi_target = xi;
    e.beta = costs[i].derivative(xi) * (xi_x + xi) * (xi_x + xi);
    e.gamma = e.beta * expected_peer_gap(prior, xi,
                                         peer_precision(plan, e.peer, options)) +
              plan_cost(costs[i], xi);
  }
  return rule;
}

PaymentRule calibrate_m1(const PriorModel& prior,
                         std::span<const EffortCostModel> costs,
                         const AllocationPlan& plan,
                         const MechanismOptions& options) {
  return calibrate_m1(prior, costs, plan,
                      cycle_pairing(plan, options.honest_xi.has_value()),
                      options);
}

PaymentRule calibrate_m2(const PriorModel& prior,
                         std::span<const EffortCostModel> costs,
                         const AllocationPlan& plan,
                         std::span<const std::size_t> pairing,
                         const MechanismOptions& options) {
  if (costs.size() != plan.size()) {
    throw InvariantError("plan and fleet sizes differ");
  }
  if (!(options.slack > 1.0)) {
    throw ConfigError("beta slack must exceed 1");
  }
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (plan.phi[i] &&
        std::abs(plan.xi_tilde[i] - costs[i].xi_u()) >
            1e-12 * costs[i].xi_u()) {
      throw InvariantError("fallback rule needs selected agents at xi_iu");
    }
  }
  check_pairing(plan, pairing, options);
  const double xi_x = prior.precision();
  PaymentRule rule = blank_rule(MechanismKind::m2, prior, plan.size(), options);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!plan.phi[i]) continue;
    const auto& model = costs[i];
    double bound = 0.0;
    for (double xi : effort_grid(model.xi_u(), options.grid_points)) {
      bound = std::max(bound, model.derivative(xi) * (xi_x + xi) * (xi_x + xi));
    }
    auto& e = rule.entries[i];
    e.selected = true;
    e.peer = pairing[i];
    e.xi_target = model.xi_u();
    e.beta = options.slack * bound;
    const double peer_xi = e.peer == kHonestPeer
                               ? *options.honest_xi
                               : costs[e.peer].xi_u();
    e.gamma = e.beta * expected_peer_gap(prior, model.xi_u(), peer_xi) +
              model.c_u();
  }
  return rule;
}

PaymentRule calibrate_m2(const PriorModel& prior,
                         std::span<const EffortCostModel> costs,
                         const AllocationPlan& plan,
                         const MechanismOptions& options) {
  return calibrate_m2(prior, costs, plan,
                      cycle_pairing(plan, options.honest_xi.has_value()),
                      options);
}

double expected_peer_gap(const PriorModel& prior, double xi_i, double xi_j) {
  if (!(xi_i >= 0.0)) throw DomainError("agent precision must be >= 0");
  if (!(xi_j > 0.0)) {
    throw DomainError("peer precision must be positive; the gap is infinite");
  }
  return 1.0 / (xi_i + prior.precision()) + 1.0 / xi_j;
}

std::string dump_rule(const PaymentRule& rule) {
  std::ostringstream out;
  out << "payment-rule v1\n";
  out << "mechanism " << to_string(rule.kind) << "\n";
  out << "prior_precision " << format_double(rule.prior_precision) << "\n";
  out << "honest_xi "
      << (rule.honest_xi ? format_double(*rule.honest_xi) : "none") << "\n";
  out << "agents " << rule.entries.size() << "\n";
  for (std::size_t i = 0; i < rule.entries.size(); ++i) {
    const auto& e = rule.entries[i];
    out << "agent " << i << " selected " << (e.selected ? 1 : 0) << " peer ";
    if (!e.selected) {
      out << "none";
    } else if (e.peer == kHonestPeer) {
      out << "honest";
    } else {
      out << e.peer;
    }
    out << " xi " << format_double(e.xi_target) << " beta "
        << format_double(e.beta) << " gamma " << format_double(e.gamma)
        << "\n";
  }
  return out.str();
}

PaymentRule parse_rule(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto fail = [](const std::string& what) -> PaymentRule {
    throw ConfigError("malformed payment rule: " + what);
  };
  std::string word, version;
  if (!(in >> word >> version) || word != "payment-rule" || version != "v1") {
    return fail("missing 'payment-rule v1' header");
  }
  PaymentRule rule;
  std::string kind, honest;
  std::size_t n = 0;
  if (!(in >> word >> kind) || word != "mechanism") return fail("mechanism");
  if (kind == "M1") {
    rule.kind = MechanismKind::m1;
  } else if (kind == "M2") {
    rule.kind = MechanismKind::m2;
  } else {
    return fail("unknown mechanism " + kind);
  }
  if (!(in >> word >> rule.prior_precision) || word != "prior_precision") {
    return fail("prior_precision");
  }
  if (!(in >> word >> honest) || word != "honest_xi") return fail("honest_xi");
  if (honest != "none") rule.honest_xi = std::stod(honest);
  if (!(in >> word >> n) || word != "agents") return fail("agents");
  rule.entries.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t index = 0;
    int selected = 0;
    std::string peer, xi_key, beta_key, gamma_key, sel_key, peer_key;
    PaymentEntry e;
    if (!(in >> word >> index >> sel_key >> selected >> peer_key >> peer >>
          xi_key >> e.xi_target >> beta_key >> e.beta >> gamma_key >>
          e.gamma) ||
        word != "agent" || sel_key != "selected" || peer_key != "peer" ||
        xi_key != "xi" || beta_key != "beta" || gamma_key != "gamma" ||
        index >= n) {
      return fail("agent line " + std::to_string(k));
    }
    e.selected = selected != 0;
    if (peer == "honest") {
      e.peer = kHonestPeer;
    } else if (peer != "none") {
      e.peer = static_cast<std::size_t>(std::stoull(peer));
    }
    rule.entries[index] = e;
  }
  return rule;
}

}  // namespace incentive
