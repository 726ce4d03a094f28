#ifndef RISKSCOUT_PLAN_HPP_
#define RISKSCOUT_PLAN_HPP_

#include <cstdint>
#include <vector>

#include "riskscout/grid.hpp"

namespace riskscout {

// Per-cell expected risk reduction and current risk over the search grid.
// Cells flagged in `searched` have already been surveyed and are no longer
// available to a plan.
struct BenefitGrid {
  Grid<double> benefit;
  Grid<double> current_risk;
  Grid<std::uint8_t> searched;

  BenefitGrid() = default;
  BenefitGrid(std::size_t rows, std::size_t cols)
      : benefit(rows, cols, 0.0), current_risk(rows, cols, 0.0), searched(rows, cols, 0) {}

  std::size_t rows() const { return benefit.rows(); }
  std::size_t cols() const { return benefit.cols(); }
  bool available(int r, int c) const { return searched(r, c) == 0; }
  void validate() const;

  bool operator==(const BenefitGrid&) const = default;
};

enum class Direction : std::uint8_t { kLeft, kRight };

// What the vehicle may do next without a transit.
enum class Heading : std::uint8_t {
  kIdle,   // not on a leg; any first cell needs a transit (zero if it is the current cell)
  kOpen,   // just searched a single-cell leg; may extend to either neighbour
  kLeft,
  kRight,
};

struct VehicleState {
  Cell cell;
  Heading heading = Heading::kIdle;
  bool operator==(const VehicleState&) const = default;
};

// A straight horizontal search run; both column ends are inclusive.
struct Leg {
  int row = 0;
  int col_start = 0;
  int col_end = 0;
  Direction direction = Direction::kRight;

  int length() const { return (col_end > col_start ? col_end - col_start : col_start - col_end) + 1; }
  Cell first() const { return {row, col_start}; }
  Cell last() const { return {row, col_end}; }
  bool operator==(const Leg&) const = default;
};

struct Plan {
  std::vector<Leg> legs;
  std::vector<Cell> searched_cells;
  int budget_used = 0;
  double expected_reward = 0.0;

  bool empty() const { return searched_cells.empty(); }
  bool operator==(const Plan&) const = default;
};

// Budget cost of searching `next` from `state`: one unit when it continues
// the current leg, otherwise the Manhattan transit plus one unit of search.
int stepCost(const VehicleState& state, Cell next);

// Vehicle state after searching `next` from `state`.
VehicleState advance(const VehicleState& state, Cell next);

// Builds a Plan from an ordered cell sequence, grouping cells into legs and
// charging costs with stepCost.
Plan planFromCells(const BenefitGrid& grid, const VehicleState& start,
                   const std::vector<Cell>& cells);

// Vehicle state at the end of `legs`, starting from `start`.
VehicleState stateAfter(const VehicleState& start, const std::vector<Leg>& legs);

// Budget cost of `leg` when flown from `state`.
int legCost(const VehicleState& state, const Leg& leg);

// Checks budget, revisit, availability and leg-shape invariants; throws
// std::logic_error naming the violated rule.
void checkPlan(const BenefitGrid& grid, const VehicleState& start, int budget, const Plan& plan);

}  // namespace riskscout

#endif  // RISKSCOUT_PLAN_HPP_
