#include "incentive/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "incentive/errors.hpp"

namespace incentive {

CoveringKnapsack::CoveringKnapsack(std::vector<KnapsackItem> items,
                                   std::int64_t capacity)
    : items_(std::move(items)), capacity_(std::max<std::int64_t>(capacity, 0)) {
  const std::int64_t cells = capacity_ + 1;
  if (cells > kMaxCells) {
    std::ostringstream msg;
    msg << "knapsack table needs " << cells << " cells (limit " << kMaxCells
        << "); use a coarser scale";
    throw ConfigError(msg.str());
  }
  words_per_row_ = static_cast<std::size_t>((cells + 63) / 64);
  if (static_cast<double>(items_.size()) * static_cast<double>(cells) >
      static_cast<double>(kMaxDecisionBits)) {
    std::ostringstream msg;
    msg << "knapsack table of " << items_.size() << " items x " << cells
        << " cells exceeds the decision table bound; use a coarser scale";
    throw ConfigError(msg.str());
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  best_.assign(static_cast<std::size_t>(cells), inf);
  best_[0] = 0.0;
  decisions_.assign(words_per_row_ * items_.size(), 0);

  for (std::size_t k = 0; k < items_.size(); ++k) {
    const auto& item = items_[k];
    if (item.weight < 0 || !(item.cost >= 0.0)) {
      throw InvariantError("knapsack items need weight >= 0 and cost >= 0");
    }
    std::uint64_t* row = decisions_.data() + k * words_per_row_;
    for (std::int64_t c = capacity_; c >= 0; --c) {
      const std::int64_t from = std::max<std::int64_t>(0, c - item.weight);
      const double candidate = best_[from] + item.cost;
      if (candidate < best_[c]) {
        best_[c] = candidate;
        row[c >> 6] |= std::uint64_t{1} << (c & 63);
      }
    }
  }
}

bool CoveringKnapsack::taken(std::size_t item, std::int64_t cell) const {
  const std::uint64_t word =
      decisions_[item * words_per_row_ + static_cast<std::size_t>(cell >> 6)];
  return (word >> (cell & 63)) & 1u;
}

double CoveringKnapsack::min_cost(std::int64_t demand) const {
  if (demand <= 0) return 0.0;
  if (demand > capacity_) {
    throw InvariantError("demand exceeds the knapsack table capacity");
  }
  return best_[static_cast<std::size_t>(demand)];
}

std::vector<std::size_t> CoveringKnapsack::selection(
    std::int64_t demand) const {
  std::vector<std::size_t> chosen;
  if (demand <= 0) return chosen;
  if (!std::isfinite(min_cost(demand))) return chosen;
  std::int64_t cell = demand;
  for (std::size_t k = items_.size(); k-- > 0;) {
    if (cell > 0 && taken(k, cell)) {
      chosen.push_back(k);
      cell = std::max<std::int64_t>(0, cell - items_[k].weight);
    }
  }
  std::reverse(chosen.begin(), chosen.end());
  return chosen;
}

std::int64_t to_cells(double value, double resolution,
                      CellRounding rounding) {
  const double scaled = value / resolution;
  const double nearest = std::round(scaled);
  if (std::abs(scaled - nearest) <= 1e-9 * std::max(1.0, std::abs(scaled))) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(rounding == CellRounding::down
                                       ? std::floor(scaled)
                                       : std::ceil(scaled));
}

std::vector<int> binary_bundles(int eta_max) {
  std::vector<int> bundles;
  int remaining = eta_max;
  for (int size = 1; remaining > 0; size *= 2) {
    const int take = std::min(size, remaining);
    bundles.push_back(take);
    remaining -= take;
  }
  return bundles;
}

}  // namespace incentive
