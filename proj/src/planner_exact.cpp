#include "riskscout/planner_exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "riskscout/error.hpp"

namespace riskscout {

namespace {

constexpr double kPruneSlack = 1e-12;
constexpr double kNoDual = std::numeric_limits<double>::infinity();

struct FlatGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> benefit;
  std::vector<std::uint8_t> free;  // available and not in the partial plan

  explicit FlatGrid(const BenefitGrid& g)
      : rows(static_cast<int>(g.rows())), cols(static_cast<int>(g.cols())) {
    benefit = g.benefit.data();
    free.resize(benefit.size());
    for (std::size_t i = 0; i < free.size(); ++i) free[i] = g.searched[i] == 0;
  }

  Cell cell(int flat) const { return {flat / cols, flat % cols}; }
  int flat(Cell c) const { return c.row * cols + c.col; }
};

struct RowValue {
  double any = 0.0;  // best over all run sets, the empty one included
  double nonempty = -std::numeric_limits<double>::infinity();
};

// Best total of (benefit - lambda) over disjoint runs of free cells in one
// row, paying lambda per run.
RowValue rowRelaxation(const FlatGrid& g, int row, double lambda) {
  RowValue out;
  double closed = 0.0;
  double open = -std::numeric_limits<double>::infinity();
  const int base = row * g.cols;
  for (int c = 0; c < g.cols; ++c) {
    if (!g.free[static_cast<std::size_t>(base + c)]) {
      open = -std::numeric_limits<double>::infinity();
      continue;
    }
    const double w = g.benefit[static_cast<std::size_t>(base + c)] - lambda;
    open = std::max(open, closed - lambda) + w;
    closed = std::max(closed, open);
    out.nonempty = std::max(out.nonempty, open);
  }
  out.any = closed;
  return out;
}

// Lagrangian dual of the run relaxation. Rows other than the vehicle's
// contribute only if they lie inside the vertical span the vehicle covers,
// and each unsearched row strictly inside that span must be crossed by some
// transit, which costs one unit more than the relaxation charges per leg.
double relaxationAt(const FlatGrid& g, int row0, double capacity, double lambda) {
  double total = lambda * capacity + rowRelaxation(g, row0, lambda).any;
  for (int step : {-1, 1}) {
    double run = 0.0, best = 0.0;
    for (int r = row0 + step; r >= 0 && r < g.rows; r += step) {
      run += std::max(rowRelaxation(g, r, lambda).nonempty, -lambda);
      best = std::max(best, run);
    }
    total += best;
  }
  return total;
}

struct Relaxation {
  double bound = 0.0;   // min of the dual and the max-cell bound
  double lambda = 0.0;  // multiplier of the best dual found
  double dual = std::numeric_limits<double>::infinity();
};

// Every future leg is a run of free cells costing its length plus one unit;
// the first leg needs no transit when it continues the current leg or starts
// on the vehicle's own cell while that cell is free, hence the extra unit of
// capacity.
bool zeroTransitStart(const FlatGrid& g, const VehicleState& state) {
  const Cell p = state.cell;
  if (g.free[static_cast<std::size_t>(g.flat(p))]) return true;
  if (state.heading == Heading::kIdle) return false;
  const bool right = state.heading != Heading::kLeft && p.col + 1 < g.cols &&
                     g.free[static_cast<std::size_t>(g.flat({p.row, p.col + 1}))];
  const bool left = state.heading != Heading::kRight && p.col > 0 &&
                    g.free[static_cast<std::size_t>(g.flat({p.row, p.col - 1}))];
  return right || left;
}

Relaxation relaxedFutureBound(const FlatGrid& g, const VehicleState& state, int remaining) {
  Relaxation out;
  if (remaining <= 0) return out;
  double best_cell = 0.0;
  for (std::size_t i = 0; i < g.free.size(); ++i) {
    if (g.free[i]) best_cell = std::max(best_cell, g.benefit[i]);
  }
  if (best_cell <= 0.0) return out;
  const double capacity = remaining + (zeroTransitStart(g, state) ? 1.0 : 0.0);

  // The dual is convex in lambda; any lambda >= 0 gives a valid bound, so a
  // short golden-section search only affects tightness.
  auto consider = [&](double lambda, double value) {
    if (value < out.dual) {
      out.dual = value;
      out.lambda = lambda;
    }
  };
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = 0.0, hi = best_cell;
  consider(lo, relaxationAt(g, state.cell.row, capacity, lo));
  consider(hi, relaxationAt(g, state.cell.row, capacity, hi));
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double f1 = relaxationAt(g, state.cell.row, capacity, x1), f2 = relaxationAt(g, state.cell.row, capacity, x2);
  consider(x1, f1);
  consider(x2, f2);
  for (int it = 0; it < 14; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = relaxationAt(g, state.cell.row, capacity, x1);
      consider(x1, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = relaxationAt(g, state.cell.row, capacity, x2);
      consider(x2, f2);
    }
  }
  out.bound = std::min(out.dual, best_cell * remaining);
  return out;
}

struct Node {
  std::int32_t parent;
  std::int32_t pos;
  std::int32_t used;
  Heading heading;
  bool tight;  // ub already holds this node's own relaxed bound
  bool zero_transit;  // the dual below granted the extra unit of capacity
  double reward;
  double ub;
  double lambda;
  double dual;  // future-reward dual at lambda; +inf when not computed
  std::uint64_t hash_a;
  std::uint64_t hash_b;
};

struct StateKey {
  std::uint64_t hash_a;
  std::uint64_t hash_b;
  std::int32_t pos;
  Heading heading;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    return static_cast<std::size_t>(k.hash_a ^ (k.hash_b * 0x9E3779B97F4A7C15ULL) ^
                                    (static_cast<std::uint64_t>(k.pos) << 3) ^
                                    static_cast<std::uint64_t>(k.heading));
  }
};

struct QueueEntry {
  double ub;
  double reward;
  std::int32_t id;
};

// Largest upper bound first, then larger reward, then the earlier node.
struct QueueOrder {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.ub != b.ub) return a.ub < b.ub;
    if (a.reward != b.reward) return a.reward < b.reward;
    return a.id > b.id;
  }
};

class BestFirstSearch {
 public:
  BestFirstSearch(const BenefitGrid& grid, int budget, const VehicleState& start,
                  const ExactOptions& options)
      : grid_(grid), flat_(grid), budget_(budget), start_(start), options_(options) {
    std::mt19937_64 rng(0x5EED5EEDULL);
    zobrist_a_.resize(flat_.benefit.size());
    zobrist_b_.resize(flat_.benefit.size());
    for (std::size_t i = 0; i < zobrist_a_.size(); ++i) {
      zobrist_a_[i] = rng();
      zobrist_b_[i] = rng();
    }
    by_benefit_.resize(flat_.benefit.size());
    for (std::size_t i = 0; i < by_benefit_.size(); ++i) by_benefit_[i] = static_cast<int>(i);
    std::stable_sort(by_benefit_.begin(), by_benefit_.end(),
                     [&](int a, int b) { return flat_.benefit[a] > flat_.benefit[b]; });
    base_free_ = flat_.free;
  }

  ExactResult run() {
    ExactResult result;
    const Plan lawnmower = lawnmowerBaseline(grid_, budget_, start_);
    result.lawnmower_reward = lawnmower.expected_reward;
    incumbent_ = std::max(0.0, lawnmower.expected_reward);
    bool lawnmower_best = lawnmower.expected_reward > 0.0;
    std::int32_t best_node = 0;

    Node root{-1, flat_.flat(start_.cell), 0, start_.heading, false, false, 0.0, 0.0, 0.0, kNoDual,
              0, 0};
    root.ub = maxCellBound(root, -1);
    nodes_.push_back(root);
    seen_[key(root)] = 0;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> frontier;
    frontier.push({root.ub, 0.0, 0});

    while (!frontier.empty()) {
      const QueueEntry top = frontier.top();
      frontier.pop();
      if (top.ub <= incumbent_ + kPruneSlack) break;
      Node node = nodes_[static_cast<std::size_t>(top.id)];
      if (options_.merge_duplicates) {
        auto it = seen_.find(key(node));
        if (it != seen_.end() && it->second < node.used) continue;
      }

      loadPartial(top.id);
      if (options_.bound == ExactBound::kRelaxed && !node.tight) {
        const VehicleState here{flat_.cell(node.pos), node.heading};
        const Relaxation relax = relaxedFutureBound(flat_, here, budget_ - node.used);
        const double ub = std::min(node.ub, node.reward + relax.bound);
        Node& stored = nodes_[static_cast<std::size_t>(top.id)];
        stored.tight = true;
        stored.ub = ub;
        stored.lambda = relax.lambda;
        stored.dual = relax.dual;
        stored.zero_transit = zeroTransitStart(flat_, here);
        unloadPartial(top.id);
        if (ub > incumbent_ + kPruneSlack) frontier.push({ub, node.reward, top.id});
        continue;
      }

      if (++result.expansions > options_.node_cap) {
        throw CapExceededError("exact planner exceeded " + std::to_string(options_.node_cap) +
                               " node expansions");
      }
      const int remaining = budget_ - node.used;
      const VehicleState state{flat_.cell(node.pos), node.heading};
      // A new leg reached by a transit pays its horizontal part (and any
      // vertical part not already charged as crossed rows) beyond the one
      // unit the relaxation charges, and forfeits the unit granted for a
      // zero-transit start. Shrinking the parent's capacity by that much at
      // the parent's multiplier still bounds every completion through the
      // child.
      auto inherited = [&](int q, int cost) {
        if (node.dual == kNoDual) return node.ub;
        const int dr = std::abs(q / flat_.cols - state.cell.row);
        const int dc = std::abs(q % flat_.cols - state.cell.col);
        const int excess = cost == 1 ? 0 : dc + std::min(dr, 1) - 1 + (node.zero_transit ? 1 : 0);
        return std::min(node.ub, node.reward + node.dual - node.lambda * excess);
      };
      auto consider = [&](int q, int cost) {
        if (cost > remaining) return;
        Node child{top.id, q, node.used + cost, advance(state, flat_.cell(q)).heading, false, false,
                   node.reward + flat_.benefit[static_cast<std::size_t>(q)], 0.0, 0.0, kNoDual,
                   node.hash_a ^ zobrist_a_[static_cast<std::size_t>(q)],
                   node.hash_b ^ zobrist_b_[static_cast<std::size_t>(q)]};
        ++result.generated;
        if (child.reward > incumbent_ + kPruneSlack) {
          incumbent_ = child.reward;
          lawnmower_best = false;
          best_node = static_cast<std::int32_t>(nodes_.size());
        }
        child.ub = std::min(maxCellBound(child, q), inherited(q, cost));
        const bool is_best = best_node == static_cast<std::int32_t>(nodes_.size());
        if (child.ub <= incumbent_ + kPruneSlack && !is_best) return;
        if (options_.merge_duplicates) {
          auto [it, inserted] = seen_.try_emplace(key(child), child.used);
          if (!inserted) {
            if (it->second <= child.used && !is_best) return;
            it->second = std::min(it->second, child.used);
          }
        }
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(child);
        if (child.ub > incumbent_ + kPruneSlack) frontier.push({child.ub, child.reward, id});
      };

      int ext[2] = {-1, -1};
      if (node.heading != Heading::kIdle) {
        if (node.heading != Heading::kLeft && state.cell.col + 1 < flat_.cols) {
          ext[0] = node.pos + 1;
        }
        if (node.heading != Heading::kRight && state.cell.col > 0) ext[1] = node.pos - 1;
      }
      for (int q : ext) {
        if (q >= 0 && flat_.free[static_cast<std::size_t>(q)]) consider(q, 1);
      }
      for (int q = 0; q < static_cast<int>(flat_.free.size()); ++q) {
        if (!flat_.free[static_cast<std::size_t>(q)] || q == ext[0] || q == ext[1]) continue;
        consider(q, manhattan(state.cell, flat_.cell(q)) + 1);
      }
      unloadPartial(top.id);
    }

    if (lawnmower_best) {
      result.plan = lawnmower;
    } else {
      std::vector<Cell> cells;
      for (std::int32_t id = best_node; nodes_[static_cast<std::size_t>(id)].parent >= 0;
           id = nodes_[static_cast<std::size_t>(id)].parent) {
        cells.push_back(flat_.cell(nodes_[static_cast<std::size_t>(id)].pos));
      }
      std::reverse(cells.begin(), cells.end());
      result.plan = planFromCells(grid_, start_, cells);
    }
    return result;
  }

 private:
  StateKey key(const Node& n) const { return {n.hash_a, n.hash_b, n.pos, n.heading}; }

  void loadPartial(std::int32_t id) {
    for (; nodes_[static_cast<std::size_t>(id)].parent >= 0;
         id = nodes_[static_cast<std::size_t>(id)].parent) {
      flat_.free[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(id)].pos)] = 0;
    }
  }

  void unloadPartial(std::int32_t id) {
    for (; nodes_[static_cast<std::size_t>(id)].parent >= 0;
         id = nodes_[static_cast<std::size_t>(id)].parent) {
      const auto pos = static_cast<std::size_t>(nodes_[static_cast<std::size_t>(id)].pos);
      flat_.free[pos] = base_free_[pos];
    }
  }

  // Called with the parent's partial plan loaded; `extra` is the cell the
  // child adds (or -1).
  double maxCellBound(const Node& n, int extra) const {
    double best = 0.0;
    for (int i : by_benefit_) {
      if (i == extra || !flat_.free[static_cast<std::size_t>(i)]) continue;
      best = std::max(0.0, flat_.benefit[static_cast<std::size_t>(i)]);
      break;
    }
    return n.reward + best * (budget_ - n.used);
  }

  const BenefitGrid& grid_;
  FlatGrid flat_;
  int budget_;
  VehicleState start_;
  ExactOptions options_;
  std::vector<std::uint64_t> zobrist_a_, zobrist_b_;
  std::vector<int> by_benefit_;
  std::vector<std::uint8_t> base_free_;
  std::vector<Node> nodes_;
  std::unordered_map<StateKey, std::int32_t, StateKeyHash> seen_;
  double incumbent_ = 0.0;
};

}  // namespace

Plan lawnmowerBaseline(const BenefitGrid& grid, int budget, const VehicleState& start) {
  grid.validate();
  const int rows = static_cast<int>(grid.rows());
  const int cols = static_cast<int>(grid.cols());
  const int r0 = start.cell.row, c0 = start.cell.col;

  std::vector<int> row_order;
  const bool down_first = r0 <= (rows - 1) / 2;
  if (down_first) {
    for (int r = r0; r < rows; ++r) row_order.push_back(r);
    for (int r = r0 - 1; r >= 0; --r) row_order.push_back(r);
  } else {
    for (int r = r0; r >= 0; --r) row_order.push_back(r);
    for (int r = r0 + 1; r < rows; ++r) row_order.push_back(r);
  }

  std::vector<Cell> sweep;
  bool rightward = c0 <= (cols - 1) / 2;
  for (std::size_t i = 0; i < row_order.size(); ++i) {
    const int r = row_order[i];
    const int from = i == 0 ? c0 : (rightward ? 0 : cols - 1);
    if (rightward) {
      for (int c = from; c < cols; ++c) sweep.push_back({r, c});
    } else {
      for (int c = from; c >= 0; --c) sweep.push_back({r, c});
    }
    rightward = !rightward;
  }

  std::vector<Cell> chosen;
  VehicleState state = start;
  int used = 0;
  for (const Cell& c : sweep) {
    if (!grid.available(c.row, c.col)) continue;
    const int cost = stepCost(state, c);
    if (used + cost > budget) break;
    used += cost;
    state = advance(state, c);
    chosen.push_back(c);
  }
  return planFromCells(grid, start, chosen);
}

double upperBound(const BenefitGrid& grid, int budget, const Plan& partial) {
  Grid<std::uint8_t> in_plan(grid.rows(), grid.cols(), 0);
  for (const Cell& c : partial.searched_cells) in_plan(c.row, c.col) = 1;
  double best = 0.0;
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      if (grid.searched(r, c) || in_plan(r, c)) continue;
      best = std::max(best, grid.benefit(r, c));
    }
  }
  return partial.expected_reward + best * std::max(0, budget - partial.budget_used);
}

double relaxedUpperBound(const BenefitGrid& grid, int budget, const VehicleState& start,
                         const Plan& partial) {
  FlatGrid flat(grid);
  for (const Cell& c : partial.searched_cells) flat.free[static_cast<std::size_t>(flat.flat(c))] = 0;
  const VehicleState state = stateAfter(start, partial.legs);
  return partial.expected_reward +
         relaxedFutureBound(flat, state, budget - partial.budget_used).bound;
}

ExactResult planExact(const BenefitGrid& grid, int budget, const VehicleState& start,
                      const ExactOptions& options) {
  grid.validate();
  if (budget < 1) throw std::invalid_argument("exact planner needs a budget of at least 1");
  if (start.cell.row < 0 || start.cell.col < 0 || start.cell.row >= static_cast<int>(grid.rows()) ||
      start.cell.col >= static_cast<int>(grid.cols())) {
    throw std::invalid_argument("start cell lies outside the grid");
  }
  return BestFirstSearch(grid, budget, start, options).run();
}

}  // namespace riskscout
