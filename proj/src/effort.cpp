#include "incentive/effort.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "incentive/errors.hpp"

namespace incentive {
namespace {

constexpr double kRangeSlack = 1e-9;
constexpr double kLatticeTolerance = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

EffortCostModel EffortCostModel::quadratic(double l, double xi_u) {
  if (!(l > 0.0) || !std::isfinite(l)) {
    throw DomainError("quadratic cost coefficient must be positive");
  }
  if (!(xi_u > 0.0) || !std::isfinite(xi_u)) {
    throw DomainError("maximum effort must be positive");
  }
  return EffortCostModel(QuadraticCost{l}, xi_u, l * xi_u * xi_u);
}

EffortCostModel EffortCostModel::discrete_linear(double sigma2_o, double c_o,
                                                 int eta_max) {
  if (!(sigma2_o > 0.0) || !std::isfinite(sigma2_o)) {
    throw DomainError("per-reading noise variance must be positive");
  }
  if (!(c_o > 0.0) || !std::isfinite(c_o)) {
    throw DomainError("per-reading cost must be positive");
  }
  if (eta_max < 1) throw DomainError("maximum reading count must be >= 1");
  return EffortCostModel(DiscreteLinearCost{sigma2_o, c_o, eta_max},
                         eta_max / sigma2_o, eta_max * c_o);
}

EffortCostModel EffortCostModel::tabulated(std::vector<double> xi,
                                           std::vector<double> c,
                                           int smoothing) {
  if (xi.size() != c.size() || xi.size() < 3) {
    throw DomainError("tabulated cost needs >= 3 matching (xi, c) nodes");
  }
  if (xi.front() != 0.0 || c.front() != 0.0) {
    throw DomainError("tabulated cost must start at (0, 0)");
  }
  for (std::size_t k = 1; k < xi.size(); ++k) {
    if (!(xi[k] > xi[k - 1]) || !std::isfinite(xi[k])) {
      throw DomainError("tabulated effort nodes must be strictly increasing");
    }
    if (!(c[k] >= c[k - 1]) || !std::isfinite(c[k])) {
      throw DomainError("tabulated cost must be non-decreasing");
    }
  }
  if (!(c.back() > 0.0)) throw DomainError("tabulated cost is identically 0");
  if (smoothing < 0) throw DomainError("smoothing window must be >= 0");

  const std::size_t n = xi.size();
  std::vector<double> slopes(n);
  slopes[0] = (c[1] - c[0]) / (xi[1] - xi[0]);
  slopes[n - 1] = (c[n - 1] - c[n - 2]) / (xi[n - 1] - xi[n - 2]);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    slopes[k] = (c[k + 1] - c[k - 1]) / (xi[k + 1] - xi[k - 1]);
  }
  std::vector<double> raw(n);
  raw[0] = (slopes[1] - slopes[0]) / (xi[1] - xi[0]);
  raw[n - 1] = (slopes[n - 1] - slopes[n - 2]) / (xi[n - 1] - xi[n - 2]);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    raw[k] = (slopes[k + 1] - slopes[k - 1]) / (xi[k + 1] - xi[k - 1]);
  }
  std::vector<double> curvatures(n);
  const auto w = static_cast<std::ptrdiff_t>(smoothing);
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, k - w);
    const std::ptrdiff_t hi =
        std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, k + w);
    double sum = 0.0;
    for (std::ptrdiff_t m = lo; m <= hi; ++m) sum += raw[m];
    curvatures[k] = sum / static_cast<double>(hi - lo + 1);
  }

  const double xi_u = xi.back();
  const double c_u = c.back();
  EffortCostModel model(TabulatedCost{std::move(xi), std::move(c), smoothing},
                        xi_u, c_u);
  model.slopes_ = std::move(slopes);
  model.curvatures_ = std::move(curvatures);
  return model;
}

EffortCostModel EffortCostModel::tabulate(
    const std::function<double(double)>& f, double xi_u, std::size_t nodes,
    int smoothing) {
  auto xi = effort_grid(xi_u, nodes);
  std::vector<double> c(xi.size());
  std::transform(xi.begin(), xi.end(), c.begin(), f);
  c[0] = 0.0;
  return tabulated(std::move(xi), std::move(c), smoothing);
}

EffortCostModel::Kind EffortCostModel::kind() const {
  return std::visit(Overloaded{
                        [](const QuadraticCost&) { return Kind::quadratic; },
                        [](const DiscreteLinearCost&) {
                          return Kind::discrete_linear;
                        },
                        [](const TabulatedCost&) { return Kind::tabulated; },
                    },
                    params_);
}

void EffortCostModel::check_range(double xi) const {
  if (!(xi >= 0.0) || xi > xi_u_ * (1.0 + kRangeSlack)) {
    std::ostringstream msg;
    msg << "effort " << xi << " outside [0, " << xi_u_ << "]";
    throw DomainError(msg.str());
  }
}

double EffortCostModel::interpolate(const std::vector<double>& values,
                                    double xi) const {
  const auto& nodes = std::get<TabulatedCost>(params_).xi;
  if (xi <= nodes.front()) return values.front();
  if (xi >= nodes.back()) return values.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), xi);
  const auto k = static_cast<std::size_t>(it - nodes.begin());
  const double t = (xi - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
  return values[k - 1] + t * (values[k] - values[k - 1]);
}

int EffortCostModel::count_for(double xi) const {
  const auto* d = as_discrete();
  if (!d) throw DomainError("lattice view only exists for discrete models");
  check_range(xi);
  const double eta = xi * d->sigma2_o;
  const double rounded = std::round(eta);
  if (std::abs(eta - rounded) > kLatticeTolerance * std::max(1.0, eta)) {
    std::ostringstream msg;
    msg << "effort " << xi << " is not a whole number of readings (eta = "
        << eta << ")";
    throw DomainError(msg.str());
  }
  return static_cast<int>(rounded);
}

double EffortCostModel::cost(double xi) const {
  check_range(xi);
  if (const auto* d = as_discrete()) return count_for(xi) * d->c_o;
  return envelope_cost(xi);
}

double EffortCostModel::envelope_cost(double xi) const {
  check_range(xi);
  xi = std::min(xi, xi_u_);
  return std::visit(
      Overloaded{
          [&](const QuadraticCost& q) { return q.l * xi * xi; },
          [&](const DiscreteLinearCost& d) { return d.sigma2_o * d.c_o * xi; },
          [&](const TabulatedCost& t) { return interpolate(t.c, xi); },
      },
      params_);
}

double EffortCostModel::derivative(double xi) const {
  check_range(xi);
  return std::visit(
      Overloaded{
          [&](const QuadraticCost& q) { return 2.0 * q.l * xi; },
          [&](const DiscreteLinearCost& d) { return d.sigma2_o * d.c_o; },
          [&](const TabulatedCost&) { return interpolate(slopes_, xi); },
      },
      params_);
}

double EffortCostModel::second_derivative(double xi) const {
  check_range(xi);
  return std::visit(
      Overloaded{
          [&](const QuadraticCost& q) { return 2.0 * q.l; },
          [&](const DiscreteLinearCost&) { return 0.0; },
          [&](const TabulatedCost&) { return interpolate(curvatures_, xi); },
      },
      params_);
}

double EffortCostModel::unit_precision() const {
  const auto* d = as_discrete();
  if (!d) throw DomainError("unit precision only exists for discrete models");
  return 1.0 / d->sigma2_o;
}

double EffortCostModel::unit_cost() const {
  const auto* d = as_discrete();
  if (!d) throw DomainError("unit cost only exists for discrete models");
  return d->c_o;
}

int EffortCostModel::max_count() const {
  const auto* d = as_discrete();
  if (!d) throw DomainError("reading count only exists for discrete models");
  return d->eta_max;
}

double EffortCostModel::quadratic_coefficient() const {
  const auto* q = as_quadratic();
  if (!q) throw DomainError("not a quadratic cost model");
  return q->l;
}

std::string EffortCostModel::describe() const {
  std::ostringstream out;
  out.precision(17);
  std::visit(Overloaded{
                 [&](const QuadraticCost& q) {
                   out << "quadratic l=" << q.l << " xi_u=" << xi_u_;
                 },
                 [&](const DiscreteLinearCost& d) {
                   out << "discrete sigma2_o=" << d.sigma2_o
                       << " c_o=" << d.c_o << " eta_max=" << d.eta_max;
                 },
                 [&](const TabulatedCost& t) {
                   out << "tabulated nodes=" << t.xi.size()
                       << " xi_u=" << xi_u_ << " c_u=" << c_u_;
                 },
             },
             params_);
  return out.str();
}

std::vector<double> effort_grid(double xi_u, std::size_t points) {
  if (points < 2) throw DomainError("effort grid needs >= 2 points");
  std::vector<double> grid(points);
  const double step = xi_u / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = step * static_cast<double>(k);
  }
  grid.back() = xi_u;
  return grid;
}

RealizabilityReport check_realizability(const EffortCostModel& model,
                                        double xi_x, std::size_t grid_points) {
  RealizabilityReport report;
  report.worst_margin = -std::numeric_limits<double>::infinity();
  for (double xi : effort_grid(model.xi_u(), grid_points)) {
    const double margin = -2.0 * model.derivative(xi) -
                          model.second_derivative(xi) * (xi_x + xi);
    if (margin > report.worst_margin) {
      report.worst_margin = margin;
      report.worst_xi = xi;
    }
  }
  report.holds = report.worst_margin < 0.0;
  return report;
}

}  // namespace incentive
