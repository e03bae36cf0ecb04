#include "incentive/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "incentive/errors.hpp"

namespace incentive {
namespace {

namespace pt = boost::property_tree;

const std::set<std::string> kKnownSections = {
    "experiment", "population", "agents", "problem", "sweep",
    "solver",     "mechanism",  "verify", "profile"};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + what + "' expects a number, got '" + text + "'");
  }
}

std::uint64_t to_u64(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
    const auto v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + what + "' expects a non-negative integer, got '" +
                      text + "'");
  }
}

bool to_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("'" + what + "' expects true/false, got '" + text + "'");
}

// key=value tokens after the leading kind word.
std::map<std::string, std::string> parse_fields(
    const std::vector<std::string>& tokens, std::string_view spec) {
  std::map<std::string, std::string> fields;
  for (std::size_t k = 1; k < tokens.size(); ++k) {
    const auto eq = tokens[k].find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=value in '" + std::string(spec) + "'");
    }
    fields[tokens[k].substr(0, eq)] = tokens[k].substr(eq + 1);
  }
  return fields;
}

std::vector<std::string> words(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

const std::string& field(const std::map<std::string, std::string>& fields,
                         const std::string& key, std::string_view spec) {
  const auto it = fields.find(key);
  if (it == fields.end()) {
    throw ConfigError("missing '" + key + "' in '" + std::string(spec) + "'");
  }
  return it->second;
}

std::vector<double> number_list(const std::string& text, char sep,
                                const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(text, sep)) {
    if (!item.empty()) out.push_back(to_double(item, what));
  }
  return out;
}

class Sections {
 public:
  explicit Sections(const pt::ptree& tree) : tree_(tree) {
    for (const auto& [name, section] : tree_) {
      if (!kKnownSections.count(name)) {
        throw ConfigError("unknown section [" + name + "]");
      }
      (void)section;
    }
  }

  std::optional<std::string> get(const std::string& section,
                                 const std::string& key) const {
    const auto s = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!s) return std::nullopt;
    const auto v = s->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  const pt::ptree* section(const std::string& name) const {
    const auto s = tree_.get_child_optional(pt::ptree::path_type(name, '\0'));
    return s ? &*s : nullptr;
  }

 private:
  const pt::ptree& tree_;
};

}  // namespace

EffortCostModel parse_cost_spec(std::string_view spec) {
  const auto tokens = words(spec);
  if (tokens.empty()) throw ConfigError("empty cost spec");
  const auto fields = parse_fields(tokens, spec);
  auto num = [&](const std::string& key) {
    return to_double(field(fields, key, spec), key);
  };
  const std::string& kind = tokens[0];
  try {
    if (kind == "quadratic") return EffortCostModel::quadratic(num("l"), num("xi_u"));
    if (kind == "discrete") {
      return EffortCostModel::discrete_linear(
          num("sigma2_o"), num("c_o"),
          static_cast<int>(to_u64(field(fields, "eta_max", spec), "eta_max")));
    }
    if (kind == "tabulated") {
      const int smoothing =
          fields.count("smoothing")
              ? static_cast<int>(to_u64(fields.at("smoothing"), "smoothing"))
              : 1;
      if (fields.count("shape")) {
        const std::string& shape = fields.at("shape");
        const double a = num("a");
        const double xi_u = num("xi_u");
        const auto nodes =
            static_cast<std::size_t>(to_u64(field(fields, "nodes", spec), "nodes"));
        std::function<double(double)> f;
        if (shape == "sqrt") {
          f = [a](double x) { return a * std::sqrt(x); };
        } else if (shape == "saturating") {
          const double k = num("k");
          f = [a, k](double x) { return a * (1.0 - std::exp(-k * x)); };
        } else if (shape == "power") {
          const double p = num("p");
          f = [a, p](double x) { return a * std::pow(x, p); };
        } else {
          throw ConfigError("unknown tabulated shape '" + shape + "'");
        }
        return EffortCostModel::tabulate(f, xi_u, nodes, smoothing);
      }
      return EffortCostModel::tabulated(
          number_list(field(fields, "xi", spec), ';', "xi"),
          number_list(field(fields, "c", spec), ';', "c"), smoothing);
    }
  } catch (const DomainError& e) {
    throw ConfigError("invalid cost spec '" + std::string(spec) +
                      "': " + e.what());
  }
  throw ConfigError("unknown cost kind '" + kind + "'");
}

ReportPolicy parse_policy(std::string_view spec) {
  const auto parts = split(spec, ':');
  if (parts[0] == "truthful" && parts.size() == 1) return ReportPolicy::truthful();
  if (parts[0] == "affine" && parts.size() == 3) {
    return ReportPolicy::affine(to_double(parts[1], "affine a"),
                                to_double(parts[2], "affine b"));
  }
  if (parts[0] == "constant" && parts.size() == 2) {
    return ReportPolicy::constant(to_double(parts[1], "constant"));
  }
  throw ConfigError("unknown report policy '" + std::string(spec) + "'");
}

ExperimentConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  const Sections s(tree);
  ExperimentConfig cfg;

  if (auto v = s.get("experiment", "sigma2_x")) {
    cfg.sigma2_x = to_double(*v, "sigma2_x");
  }
  if (auto v = s.get("experiment", "xi_x")) {
    cfg.sigma2_x = 1.0 / to_double(*v, "xi_x");
  }
  if (!(cfg.sigma2_x > 0.0) || !std::isfinite(cfg.sigma2_x)) {
    throw ConfigError("prior variance must be positive");
  }
  if (auto v = s.get("experiment", "seed")) cfg.seed = to_u64(*v, "seed");
  if (auto v = s.get("experiment", "trials")) {
    cfg.trials = static_cast<std::size_t>(to_u64(*v, "trials"));
  }
  if (auto v = s.get("experiment", "jobs")) {
    cfg.jobs = static_cast<int>(to_u64(*v, "jobs"));
  }

  if (s.section("population")) {
    PopulationSpec spec;
    if (auto v = s.get("population", "agents")) {
      spec.agents = static_cast<std::size_t>(to_u64(*v, "agents"));
    }
    if (auto v = s.get("population", "cost_floor")) {
      spec.cost_floor = to_double(*v, "cost_floor");
    }
    if (auto v = s.get("population", "precision_min")) {
      spec.precision_min = to_double(*v, "precision_min");
    }
    if (auto v = s.get("population", "precision_max")) {
      spec.precision_max = to_double(*v, "precision_max");
    }
    if (spec.agents == 0) throw ConfigError("population agents must be >= 1");
    cfg.population = spec;
  }
  if (auto v = s.get("population", "eta_max")) {
    cfg.eta_max = static_cast<int>(to_u64(*v, "eta_max"));
    if (cfg.eta_max < 1) throw ConfigError("eta_max must be >= 1");
  }

  if (const auto* agents = s.section("agents")) {
    std::map<std::size_t, EffortCostModel> by_index;
    for (const auto& [key, node] : *agents) {
      const auto index = static_cast<std::size_t>(to_u64(key, "agent index"));
      by_index.emplace(index, parse_cost_spec(node.get_value<std::string>()));
    }
    for (std::size_t i = 0; i < by_index.size(); ++i) {
      if (!by_index.count(i)) {
        throw ConfigError("[agents] indices must run 0.." +
                          std::to_string(by_index.size() - 1));
      }
      cfg.agents.push_back(by_index.at(i));
    }
  }
  if (!cfg.population && cfg.agents.empty() &&
      (s.section("problem") || s.section("sweep"))) {
    throw ConfigError("config needs [agents] or [population]");
  }

  if (auto v = s.get("problem", "sigma_t")) {
    cfg.sigma_t = to_double(*v, "sigma_t");
    if (!(*cfg.sigma_t > 0.0)) throw ConfigError("sigma_t must be positive");
  }

  if (s.section("sweep")) {
    if (auto v = s.get("sweep", "sigma_t")) {
      cfg.sweep_sigma_t = number_list(*v, ',', "sweep sigma_t");
    } else {
      const auto lo = s.get("sweep", "sigma_t_min");
      const auto hi = s.get("sweep", "sigma_t_max");
      const auto points = s.get("sweep", "points");
      if (!lo || !hi || !points) {
        throw ConfigError(
            "[sweep] needs sigma_t or sigma_t_min/sigma_t_max/points");
      }
      const double a = to_double(*lo, "sigma_t_min");
      const double b = to_double(*hi, "sigma_t_max");
      const auto n = static_cast<std::size_t>(to_u64(*points, "points"));
      const std::string spacing = s.get("sweep", "spacing").value_or("log");
      if (n == 0 || !(a > 0.0) || !(b >= a)) {
        throw ConfigError("[sweep] range must satisfy 0 < min <= max, points > 0");
      }
      for (std::size_t k = 0; k < n; ++k) {
        const double t = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
        if (spacing == "log") {
          cfg.sweep_sigma_t.push_back(a * std::pow(b / a, t));
        } else if (spacing == "linear") {
          cfg.sweep_sigma_t.push_back(a + (b - a) * t);
        } else {
          throw ConfigError("unknown sweep spacing '" + spacing + "'");
        }
      }
    }
    if (cfg.sweep_sigma_t.empty()) throw ConfigError("sweep list is empty");
    for (double v : cfg.sweep_sigma_t) {
      if (!(v > 0.0)) throw ConfigError("sweep sigma_t values must be > 0");
    }
    std::sort(cfg.sweep_sigma_t.begin(), cfg.sweep_sigma_t.end());
    const std::string regime = s.get("sweep", "regime").value_or("auto");
    if (regime == "auto") {
      cfg.mode = SweepMode::automatic;
    } else if (regime == "optimal") {
      cfg.mode = SweepMode::optimal;
    } else if (regime == "suboptimal") {
      cfg.mode = SweepMode::suboptimal;
    } else if (regime == "paired") {
      cfg.mode = SweepMode::paired;
    } else {
      throw ConfigError("unknown sweep regime '" + regime + "'");
    }
    if (auto v = s.get("sweep", "verify")) cfg.verify = to_bool(*v, "verify");
  }

  if (auto v = s.get("solver", "method")) {
    static const std::map<std::string, SolverChoice> methods = {
        {"auto", SolverChoice::automatic},   {"quadratic", SolverChoice::quadratic},
        {"bkp", SolverChoice::bkp},          {"binary", SolverChoice::binary},
        {"continuous", SolverChoice::continuous}};
    const auto it = methods.find(*v);
    if (it == methods.end()) throw ConfigError("unknown solver method '" + *v + "'");
    cfg.method = it->second;
  }
  if (auto v = s.get("solver", "kp_scale")) {
    cfg.solver.kp_scale = to_double(*v, "kp_scale");
  }
  if (auto v = s.get("solver", "bkp_resolution")) {
    cfg.solver.bkp_resolution = to_double(*v, "bkp_resolution");
  }
  if (auto v = s.get("solver", "bkp_max_cells")) {
    cfg.solver.bkp_max_cells = static_cast<std::int64_t>(to_u64(*v, "bkp_max_cells"));
  }
  if (auto v = s.get("solver", "realizability_grid")) {
    cfg.solver.realizability_grid =
        static_cast<std::size_t>(to_u64(*v, "realizability_grid"));
    cfg.mechanism.grid_points = cfg.solver.realizability_grid;
  }
  if (auto v = s.get("solver", "descent_starts")) {
    cfg.solver.descent_starts = static_cast<int>(to_u64(*v, "descent_starts"));
  }
  if (cfg.solver.realizability_grid < 2 || cfg.solver.bkp_max_cells < 1 ||
      !(cfg.solver.kp_scale > 0.0)) {
    throw ConfigError("solver grid, cell and scale settings must be positive");
  }

  if (auto v = s.get("mechanism", "slack")) {
    cfg.mechanism.slack = to_double(*v, "slack");
    if (!(cfg.mechanism.slack > 1.0)) throw ConfigError("slack must exceed 1");
  }
  if (auto v = s.get("mechanism", "honest_xi")) {
    cfg.mechanism.honest_xi = to_double(*v, "honest_xi");
    if (!(*cfg.mechanism.honest_xi > 0.0)) {
      throw ConfigError("honest_xi must be positive");
    }
  }

  if (auto v = s.get("verify", "effort_points")) {
    cfg.grid.effort_points = static_cast<std::size_t>(to_u64(*v, "effort_points"));
    if (cfg.grid.effort_points < 2) throw ConfigError("effort_points must be >= 2");
  }
  if (auto v = s.get("verify", "z")) cfg.grid.z = to_double(*v, "z");

  if (const auto* profile = s.section("profile")) {
    for (const auto& [key, node] : *profile) {
      const auto index = static_cast<std::size_t>(to_u64(key, "profile index"));
      const std::string spec = node.get_value<std::string>();
      const auto tokens = words(spec);
      std::vector<std::string> with_kind{"profile"};
      with_kind.insert(with_kind.end(), tokens.begin(), tokens.end());
      const auto fields = parse_fields(with_kind, spec);
      AgentStrategy strategy;
      strategy.xi = to_double(field(fields, "xi", spec), "xi");
      if (fields.count("estimate")) {
        strategy.estimate = parse_policy(fields.at("estimate"));
      }
      if (fields.count("measurement")) {
        strategy.measurement = parse_policy(fields.at("measurement"));
      }
      cfg.profile_overrides[index] = strategy;
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::vector<EffortCostModel> ExperimentConfig::fleet() const {
  if (!agents.empty()) return agents;
  if (population) {
    return draw_population(*population, require_seed()).fleet(eta_max);
  }
  throw ConfigError("config defines neither [agents] nor [population]");
}

std::uint64_t ExperimentConfig::require_seed() const {
  if (!seed) {
    throw ConfigError("no seed given; set [experiment] seed or pass --seed");
  }
  return *seed;
}

std::string ExperimentConfig::snapshot() const {
  std::ostringstream out;
  out.precision(17);
  out << "sigma2_x=" << sigma2_x << "\n";
  out << "seed=" << (seed ? std::to_string(*seed) : "none") << "\n";
  out << "trials=" << trials << "\n";
  if (population) {
    out << "population.agents=" << population->agents << "\n";
    out << "population.eta_max=" << eta_max << "\n";
    out << "population.cost_floor=" << population->cost_floor << "\n";
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    out << "agent." << i << "=" << agents[i].describe() << "\n";
  }
  out << "sweep.points=" << sweep_sigma_t.size() << "\n";
  out << "solver.kp_scale=" << solver.kp_scale << "\n";
  out << "solver.bkp_resolution=" << solver.bkp_resolution << "\n";
  out << "solver.bkp_max_cells=" << solver.bkp_max_cells << "\n";
  out << "mechanism.slack=" << mechanism.slack << "\n";
  out << "verify.effort_points=" << grid.effort_points << "\n";
  out << "verify.z=" << grid.z << "\n";
  return out.str();
}

}  // namespace incentive
