#include "riskscout/plan.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace riskscout {

void BenefitGrid::validate() const {
  if (benefit.rows() == 0 || benefit.cols() == 0) {
    throw std::invalid_argument("benefit grid must have positive dimensions");
  }
  if (current_risk.rows() != benefit.rows() || current_risk.cols() != benefit.cols() ||
      searched.rows() != benefit.rows() || searched.cols() != benefit.cols()) {
    throw std::invalid_argument("benefit grid layers differ in shape");
  }
  for (std::size_t i = 0; i < benefit.size(); ++i) {
    if (!std::isfinite(benefit[i]) || !std::isfinite(current_risk[i])) {
      throw std::invalid_argument("benefit grid has non-finite entries");
    }
  }
}

int stepCost(const VehicleState& state, Cell next) {
  if (next.row == state.cell.row) {
    const int dc = next.col - state.cell.col;
    const bool right = dc == 1 && (state.heading == Heading::kOpen || state.heading == Heading::kRight);
    const bool left = dc == -1 && (state.heading == Heading::kOpen || state.heading == Heading::kLeft);
    if (right || left) return 1;
  }
  return manhattan(state.cell, next) + 1;
}

VehicleState advance(const VehicleState& state, Cell next) {
  if (stepCost(state, next) == 1 && !(next == state.cell)) {
    return {next, next.col > state.cell.col ? Heading::kRight : Heading::kLeft};
  }
  return {next, Heading::kOpen};
}

int legCost(const VehicleState& state, const Leg& leg) {
  return stepCost(state, leg.first()) + leg.length() - 1;
}

VehicleState stateAfter(const VehicleState& start, const std::vector<Leg>& legs) {
  VehicleState s = start;
  for (const Leg& leg : legs) {
    if (leg.length() == 1) {
      s = advance(s, leg.first());
    } else {
      s = {leg.last(), leg.direction == Direction::kRight ? Heading::kRight : Heading::kLeft};
    }
  }
  return s;
}

Plan planFromCells(const BenefitGrid& grid, const VehicleState& start,
                   const std::vector<Cell>& cells) {
  Plan plan;
  VehicleState state = start;
  for (const Cell& c : cells) {
    const int cost = stepCost(state, c);
    const bool continues = cost == 1 && !plan.legs.empty() && !(c == state.cell) &&
                           plan.legs.back().row == c.row && plan.legs.back().col_end == state.cell.col;
    if (continues) {
      Leg& leg = plan.legs.back();
      leg.col_end = c.col;
      leg.direction = c.col > leg.col_start ? Direction::kRight : Direction::kLeft;
    } else {
      const bool leftward = cost == 1 && !(c == state.cell) && c.col < state.cell.col;
      plan.legs.push_back(
          Leg{c.row, c.col, c.col, leftward ? Direction::kLeft : Direction::kRight});
    }
    plan.budget_used += cost;
    plan.expected_reward += grid.benefit(c.row, c.col);
    plan.searched_cells.push_back(c);
    state = advance(state, c);
  }
  return plan;
}

void checkPlan(const BenefitGrid& grid, const VehicleState& start, int budget, const Plan& plan) {
  Grid<std::uint8_t> seen(grid.rows(), grid.cols(), 0);
  int cells = 0;
  for (const Leg& leg : plan.legs) {
    if (leg.row < 0 || leg.row >= static_cast<int>(grid.rows()) || leg.col_start < 0 ||
        leg.col_end < 0 || leg.col_start >= static_cast<int>(grid.cols()) ||
        leg.col_end >= static_cast<int>(grid.cols())) {
      throw std::logic_error("plan leg leaves the grid");
    }
    if ((leg.direction == Direction::kRight && leg.col_end < leg.col_start) ||
        (leg.direction == Direction::kLeft && leg.col_end > leg.col_start)) {
      throw std::logic_error("plan leg direction disagrees with its span");
    }
    const int step = leg.col_end >= leg.col_start ? 1 : -1;
    for (int c = leg.col_start;; c += step) {
      if (!grid.available(leg.row, c)) throw std::logic_error("plan searches an already searched cell");
      if (seen(leg.row, c)) throw std::logic_error("plan searches a cell twice");
      seen(leg.row, c) = 1;
      const Cell expect = plan.searched_cells.at(static_cast<std::size_t>(cells));
      if (!(expect == Cell{leg.row, c})) throw std::logic_error("plan cell list disagrees with legs");
      ++cells;
      if (c == leg.col_end) break;
    }
  }
  if (cells != static_cast<int>(plan.searched_cells.size())) {
    throw std::logic_error("plan cell list disagrees with legs");
  }
  VehicleState state = start;
  int used = 0;
  for (const Leg& leg : plan.legs) {
    used += legCost(state, leg);
    state = stateAfter(state, {leg});
  }
  if (used != plan.budget_used) {
    throw std::logic_error("plan budget accounting is off: " + std::to_string(used) + " vs " +
                           std::to_string(plan.budget_used));
  }
  if (used > budget) throw std::logic_error("plan exceeds the budget");
}

}  // namespace riskscout
