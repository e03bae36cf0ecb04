#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace incentive {

// One 0/1 choice of the covering knapsack. `owner` and `count` let callers
// map a chosen item back to an agent and a number of readings.
struct KnapsackItem {
  std::int64_t weight = 0;
  double cost = 0.0;
  std::size_t owner = 0;
  int count = 1;
};

// Minimum-cost covering knapsack over integer weights:
//
//   min sum cost_k x_k   s.t.  sum weight_k x_k >= demand,  x_k in {0, 1}.
//
// best[c] holds the cheapest cost reaching a total weight of at least c, for
// every c up to `capacity`, so a single table answers any demand <= capacity.
// Items are taken only on strict improvement, which keeps lower-indexed items
// on ties.
class CoveringKnapsack {
 public:
  // Table size guards: cells per row and total decision bits.
  static constexpr std::int64_t kMaxCells = std::int64_t{1} << 27;
  static constexpr std::int64_t kMaxDecisionBits = std::int64_t{1} << 32;

  CoveringKnapsack(std::vector<KnapsackItem> items, std::int64_t capacity);

  std::int64_t capacity() const { return capacity_; }
  // +inf when the demand is unreachable.
  double min_cost(std::int64_t demand) const;
  // Indices into the item list of an optimal selection for `demand`.
  std::vector<std::size_t> selection(std::int64_t demand) const;
  const std::vector<KnapsackItem>& items() const { return items_; }

 private:
  bool taken(std::size_t item, std::int64_t cell) const;

  std::vector<KnapsackItem> items_;
  std::int64_t capacity_;
  std::size_t words_per_row_;
  std::vector<double> best_;
  std::vector<std::uint64_t> decisions_;
};

// Converts a real quantity to table cells. Values within 1e-9 (relative) of
// an integer snap to it; otherwise they round in the requested direction.
enum class CellRounding { down, up };
std::int64_t to_cells(double value, double resolution, CellRounding rounding);

// Splits a bound of `eta_max` copies into 1, 2, 4, ..., remainder bundles.
std::vector<int> binary_bundles(int eta_max);

}  // namespace incentive
