#include "riskscout/planner_orienteering.hpp"

#include <algorithm>
#include <stdexcept>

namespace riskscout {

namespace {

constexpr double kPruneSlack = 1e-12;

int nearerEndOffset(int col, int cols) { return std::min(col, cols - 1 - col); }

class DepthFirstSearch {
 public:
  DepthFirstSearch(const RowGraph& g, int budget, std::uint64_t cap)
      : g_(g), budget_(budget), cap_(cap), visited_(static_cast<std::size_t>(g.rows), 0) {
    for (int v = 0; v < g.rows; ++v) {
      if (g.reward[static_cast<std::size_t>(v)] > 0.0) order_.push_back(v);
    }
    // Non-increasing reward per unit weight; ties keep row order.
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return g.reward[static_cast<std::size_t>(a)] / g.weight(a) >
             g.reward[static_cast<std::size_t>(b)] / g.weight(b);
    });
  }

  OrienteeringResult run() {
    OrienteeringResult result;
    if (budget_ < g_.start_cost) return result;
    const double start_reward = g_.start_swept ? 0.0 : g_.reward[static_cast<std::size_t>(g_.start_row)];
    path_.push_back(g_.start_row);
    visited_[static_cast<std::size_t>(g_.start_row)] = 1;
    best_ = makeTour(g_, path_);
    best_reward_ = best_.total_reward;
    search(g_.start_cost, start_reward);
    result.tour = best_;
    result.expansions = expansions_;
    result.capped = capped_;
    return result;
  }

 private:
  // Fractional knapsack over unvisited rows in ratio order.
  double bound(int residual) const {
    double total = 0.0;
    double room = residual;
    for (int v : order_) {
      if (visited_[static_cast<std::size_t>(v)]) continue;
      const double w = g_.weight(v);
      if (room >= w) {
        total += g_.reward[static_cast<std::size_t>(v)];
        room -= w;
      } else {
        total += g_.reward[static_cast<std::size_t>(v)] * room / w;
        break;
      }
    }
    return total;
  }

  void search(int cost, double reward) {
    if (expansions_ >= cap_) {
      capped_ = true;
      return;
    }
    ++expansions_;
    const int last = path_.back();
    for (int v : order_) {
      if (capped_) return;
      if (visited_[static_cast<std::size_t>(v)]) continue;
      int step = g_.edgeCost(last, v);
      if (path_.size() == 1 && g_.start_swept) step += g_.first_edge_extra;
      const int child_cost = cost + step;
      if (child_cost > budget_) continue;
      const double child_reward = reward + g_.reward[static_cast<std::size_t>(v)];
      path_.push_back(v);
      visited_[static_cast<std::size_t>(v)] = 1;
      if (child_reward > best_reward_ + kPruneSlack) {
        best_reward_ = child_reward;
        best_ = twoOpt(makeTour(g_, path_), g_);
      }
      if (child_reward + bound(budget_ - child_cost) > best_reward_ + kPruneSlack) {
        search(child_cost, child_reward);
      }
      visited_[static_cast<std::size_t>(v)] = 0;
      path_.pop_back();
    }
  }

  const RowGraph& g_;
  int budget_;
  std::uint64_t cap_;
  std::vector<int> order_;
  std::vector<std::uint8_t> visited_;
  std::vector<int> path_;
  Tour best_;
  double best_reward_ = 0.0;
  std::uint64_t expansions_ = 0;
  bool capped_ = false;
};

}  // namespace

RowGraph buildRowGraph(const BenefitGrid& grid, const VehicleState& vehicle) {
  grid.validate();
  RowGraph g;
  g.rows = static_cast<int>(grid.rows());
  g.cols = static_cast<int>(grid.cols());
  if (vehicle.cell.row < 0 || vehicle.cell.row >= g.rows || vehicle.cell.col < 0 ||
      vehicle.cell.col >= g.cols) {
    throw std::invalid_argument("vehicle lies outside the grid");
  }
  g.start_row = vehicle.cell.row;
  g.vehicle = vehicle.cell;
  g.reward.assign(static_cast<std::size_t>(g.rows), 0.0);
  for (int r = 0; r < g.rows; ++r) {
    double sum = 0.0;
    bool untouched = true;
    for (int c = 0; c < g.cols; ++c) {
      if (!grid.available(r, c)) {
        untouched = false;
        break;
      }
      sum += grid.benefit(r, c);
    }
    g.reward[static_cast<std::size_t>(r)] = untouched ? sum : 0.0;
    if (r == g.start_row) g.start_swept = !untouched;
  }
  const int offset = nearerEndOffset(vehicle.cell.col, g.cols);
  if (g.start_swept) {
    g.start_cost = 0;
    g.first_edge_extra = offset;
  } else {
    g.start_cost = g.cols + offset;
  }
  return g;
}

RowGraph buildRowGraph(const BenefitGrid& grid, int start_row) {
  return buildRowGraph(grid, VehicleState{{start_row, 0}, Heading::kIdle});
}

Tour makeTour(const RowGraph& g, std::vector<int> vertices) {
  Tour t;
  t.vertices = std::move(vertices);
  if (t.vertices.empty()) return t;
  const bool from_start = t.vertices.front() == g.start_row;
  t.total_cost = from_start ? g.start_cost : g.cols;
  if (!(from_start && g.start_swept)) {
    t.total_reward += g.reward[static_cast<std::size_t>(t.vertices.front())];
  }
  for (std::size_t i = 1; i < t.vertices.size(); ++i) {
    t.total_cost += g.edgeCost(t.vertices[i - 1], t.vertices[i]);
    if (i == 1 && from_start && g.start_swept) t.total_cost += g.first_edge_extra;
    t.total_reward += g.reward[static_cast<std::size_t>(t.vertices[i])];
  }
  return t;
}

double knapsackUpperBound(const RowGraph& g, int budget, const Tour& partial) {
  std::vector<int> order;
  for (int v = 0; v < g.rows; ++v) {
    if (std::find(partial.vertices.begin(), partial.vertices.end(), v) == partial.vertices.end() &&
        g.reward[static_cast<std::size_t>(v)] > 0.0) {
      order.push_back(v);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return g.reward[static_cast<std::size_t>(a)] / g.weight(a) >
           g.reward[static_cast<std::size_t>(b)] / g.weight(b);
  });
  double total = partial.total_reward;
  double room = budget - partial.total_cost;
  for (int v : order) {
    if (room <= 0.0) break;
    const double w = g.weight(v);
    if (room >= w) {
      total += g.reward[static_cast<std::size_t>(v)];
      room -= w;
    } else {
      total += g.reward[static_cast<std::size_t>(v)] * room / w;
      break;
    }
  }
  return total;
}

Tour twoOpt(const Tour& tour, const RowGraph& g) {
  std::vector<int> t = tour.vertices;
  const std::size_t h = t.size();
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 1; i + 1 < h && !improved; ++i) {
      for (std::size_t k = i + 1; k < h && !improved; ++k) {
        int delta = g.edgeCost(t[i - 1], t[k]) - g.edgeCost(t[i - 1], t[i]);
        if (k + 1 < h) delta += g.edgeCost(t[i], t[k + 1]) - g.edgeCost(t[k], t[k + 1]);
        if (delta < 0) {
          std::reverse(t.begin() + static_cast<std::ptrdiff_t>(i),
                       t.begin() + static_cast<std::ptrdiff_t>(k) + 1);
          improved = true;
        }
      }
    }
  }
  return makeTour(g, std::move(t));
}

OrienteeringResult planOrienteering(const RowGraph& g, int budget, std::uint64_t iteration_cap) {
  if (iteration_cap < 1) throw std::invalid_argument("iteration cap must be at least 1");
  if (g.rows < 1 || g.cols < 1 || static_cast<int>(g.reward.size()) != g.rows) {
    throw std::invalid_argument("malformed row graph");
  }
  return DepthFirstSearch(g, budget, iteration_cap).run();
}

Plan tourToPlan(const Tour& tour, const RowGraph& g, const BenefitGrid& grid,
                const VehicleState& vehicle) {
  std::vector<Cell> cells;
  int col = vehicle.cell.col;
  for (std::size_t i = 0; i < tour.vertices.size(); ++i) {
    const int row = tour.vertices[i];
    if (i == 0 && row == g.start_row && g.start_swept) continue;
    const bool rightward = col <= (g.cols - 1) / 2;
    for (int k = 0; k < g.cols; ++k) cells.push_back({row, rightward ? k : g.cols - 1 - k});
    col = rightward ? g.cols - 1 : 0;
  }
  return planFromCells(grid, vehicle, cells);
}

}  // namespace riskscout
