#ifndef RISKSCOUT_PLANNER_EXACT_HPP_
#define RISKSCOUT_PLANNER_EXACT_HPP_

#include <cstdint>

#include "riskscout/plan.hpp"

namespace riskscout {

enum class ExactBound {
  // Best unsearched benefit times the remaining budget.
  kMaxCell,
  // Minimum of kMaxCell and a Lagrangian relaxation in which every future leg
  // is a run of free cells costing its length plus one transit unit.
  kRelaxed,
};

struct ExactOptions {
  ExactBound bound = ExactBound::kRelaxed;
  // Merge partial plans that cover the same cells and end in the same
  // vehicle state, keeping the cheaper one.
  bool merge_duplicates = true;
  std::uint64_t node_cap = 10'000'000;
};

struct ExactResult {
  Plan plan;
  std::uint64_t expansions = 0;
  std::uint64_t generated = 0;
  // Reward of the boustrophedon plan used as the first incumbent.
  double lawnmower_reward = 0.0;
};

// Boustrophedon sweep from the vehicle position, skipping searched cells,
// truncated when the next cell no longer fits in the budget.
Plan lawnmowerBaseline(const BenefitGrid& grid, int budget, const VehicleState& start);

// reward(partial) + (best unsearched benefit) * (budget - partial.budget_used).
double upperBound(const BenefitGrid& grid, int budget, const Plan& partial);

// The kRelaxed bound for `partial` flown from `start`.
double relaxedUpperBound(const BenefitGrid& grid, int budget, const VehicleState& start,
                         const Plan& partial);

// Reward-maximal plan within `budget`, by best-first branch and bound.
// Throws std::invalid_argument for budget < 1 and CapExceededError when the
// expansion cap is hit.
ExactResult planExact(const BenefitGrid& grid, int budget, const VehicleState& start,
                      const ExactOptions& options = {});

}  // namespace riskscout

#endif  // RISKSCOUT_PLANNER_EXACT_HPP_
