#ifndef RISKSCOUT_PLANNER_ORIENTEERING_HPP_
#define RISKSCOUT_PLANNER_ORIENTEERING_HPP_

#include <cstdint>
#include <limits>
#include <vector>

#include "riskscout/plan.hpp"

namespace riskscout {

// Rows of the search grid as vertices of an orienteering problem. Moving from
// the end of row i to sweep row j costs cols + |i - j|.
struct RowGraph {
  int rows = 0;
  int cols = 0;
  std::vector<double> reward;  // sum of available benefit per row; 0 for rows with searched cells
  int start_row = 0;
  bool start_swept = false;     // vehicle has already surveyed its row
  int start_cost = 0;           // budget to sweep the start row first (0 when swept)
  int first_edge_extra = 0;     // run to the nearer row end when leaving a swept row mid-way
  Cell vehicle;

  int edgeCost(int from, int to) const { return cols + (from > to ? from - to : to - from); }
  // Cheapest way to reach row j from any other row.
  int weight(int) const { return rows > 1 ? cols + 1 : cols; }
};

// Ordered open tour; vertices[0] is the start row.
struct Tour {
  std::vector<int> vertices;
  int total_cost = 0;
  double total_reward = 0.0;

  bool operator==(const Tour&) const = default;
};

struct OrienteeringResult {
  Tour tour;
  std::uint64_t expansions = 0;
  bool capped = false;  // stopped by the iteration cap before exhausting the tree
};

inline constexpr std::uint64_t kUnlimitedIterations = std::numeric_limits<std::uint64_t>::max();
inline constexpr std::uint64_t kDefaultIterationCap = 1'000'000;

RowGraph buildRowGraph(const BenefitGrid& grid, const VehicleState& vehicle);
RowGraph buildRowGraph(const BenefitGrid& grid, int start_row);

// Recomputes cost and reward of a vertex sequence.
Tour makeTour(const RowGraph& g, std::vector<int> vertices);

// reward(partial) plus the fractional-knapsack (Dantzig) relaxation over the
// vertices not in `partial`, with capacity budget - partial.total_cost.
double knapsackUpperBound(const RowGraph& g, int budget, const Tour& partial);

// 2-opt segment reversals with the first vertex fixed, until no move lowers
// the open-tour cost.
Tour twoOpt(const Tour& tour, const RowGraph& g);

// Depth-first branch and bound over open tours, stopped after `iteration_cap`
// node expansions. Returns an empty tour when the start row is unaffordable.
OrienteeringResult planOrienteering(const RowGraph& g, int budget,
                                    std::uint64_t iteration_cap = kDefaultIterationCap);

// Expands every row of the tour into one full-width leg, alternating sides.
Plan tourToPlan(const Tour& tour, const RowGraph& g, const BenefitGrid& grid,
                const VehicleState& vehicle);

}  // namespace riskscout

#endif  // RISKSCOUT_PLANNER_ORIENTEERING_HPP_
