#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace incentive {

struct QuadraticCost {
  double l = 1.0;
};

// eta repeated readings of noise variance sigma2_o, each costing c_o.
struct DiscreteLinearCost {
  double sigma2_o = 1.0;
  double c_o = 1.0;
  int eta_max = 1;
};

// Sampled cost curve. Costs are interpolated linearly between nodes; node
// slopes come from centered differences and node curvatures from centered
// differences of the slopes, averaged over +-smoothing neighbours.
struct TabulatedCost {
  std::vector<double> xi;
  std::vector<double> c;
  int smoothing = 1;
};

// Effort cost c(xi) on [0, xi_u] with c(0) = 0 and c non-decreasing.
class EffortCostModel {
 public:
  enum class Kind { quadratic, discrete_linear, tabulated };

  static EffortCostModel quadratic(double l, double xi_u);
  static EffortCostModel discrete_linear(double sigma2_o, double c_o,
                                         int eta_max);
  static EffortCostModel tabulated(std::vector<double> xi,
                                   std::vector<double> c, int smoothing = 1);
  // Samples f on `nodes` evenly spaced points of [0, xi_u].
  static EffortCostModel tabulate(const std::function<double(double)>& f,
                                  double xi_u, std::size_t nodes,
                                  int smoothing = 1);

  Kind kind() const;
  double xi_u() const { return xi_u_; }
  double c_u() const { return c_u_; }

  // c(xi). For the discrete model xi must sit on the measurement lattice.
  double cost(double xi) const;
  // Continuous reading of c: the linear envelope for the discrete model and
  // cost() for everything else.
  double envelope_cost(double xi) const;
  double derivative(double xi) const;
  double second_derivative(double xi) const;

  // Discrete lattice view.
  double unit_precision() const;  // 1 / sigma2_o
  double unit_cost() const;       // c_o
  int max_count() const;          // eta_max
  // Number of readings that realise xi; throws off the lattice.
  int count_for(double xi) const;

  double quadratic_coefficient() const;

  const QuadraticCost* as_quadratic() const {
    return std::get_if<QuadraticCost>(&params_);
  }
  const DiscreteLinearCost* as_discrete() const {
    return std::get_if<DiscreteLinearCost>(&params_);
  }
  const TabulatedCost* as_tabulated() const {
    return std::get_if<TabulatedCost>(&params_);
  }

  std::string describe() const;

 private:
  using Params = std::variant<QuadraticCost, DiscreteLinearCost, TabulatedCost>;
  EffortCostModel(Params params, double xi_u, double c_u)
      : params_(std::move(params)), xi_u_(xi_u), c_u_(c_u) {}

  void check_range(double xi) const;
  double interpolate(const std::vector<double>& values, double xi) const;

  Params params_;
  double xi_u_;
  double c_u_;
  // Tabulated node slopes and curvatures.
  std::vector<double> slopes_;
  std::vector<double> curvatures_;
};

// n evenly spaced points covering [0, xi_u] including both ends.
std::vector<double> effort_grid(double xi_u, std::size_t points);

struct RealizabilityReport {
  bool holds = true;
  // Largest value of -2 c'(xi) - c''(xi) (xi_x + xi) seen on the grid, and
  // where it occurred. The condition needs this to stay below zero.
  double worst_margin = 0.0;
  double worst_xi = 0.0;
};

inline constexpr std::size_t kDefaultRealizabilityGrid = 10000;

RealizabilityReport check_realizability(
    const EffortCostModel& model, double xi_x,
    std::size_t grid_points = kDefaultRealizabilityGrid);

inline bool realizability_holds(
    const EffortCostModel& model, double xi_x,
    std::size_t grid_points = kDefaultRealizabilityGrid) {
  return check_realizability(model, xi_x, grid_points).holds;
}

}  // namespace incentive
