// Brute-force reference computations used only by the test suites. Nothing
// here calls into the library's numerical code paths.
#ifndef RISKSCOUT_TESTS_ORACLES_HPP_
#define RISKSCOUT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <vector>

namespace oracle {

struct Sensor {
  std::vector<double> detection;
  std::vector<double> false_alarm;
  std::vector<std::vector<double>> confusion;
};

struct Cell {
  std::vector<double> targets;
  std::vector<double> env;
  double under = 1.0, over = 1.0, env_under = 1.0, env_over = 1.0;
};

// Enumerates every detected/missed pattern of the x targets and pays the
// remaining z - k counts with geometric false alarms.
inline double likelihood(int z, int x, double d, double a) {
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << x); ++mask) {
    int k = 0;
    double p = 1.0;
    for (int t = 0; t < x; ++t) {
      if (mask & (1u << t)) {
        ++k;
        p *= d;
      } else {
        p *= 1.0 - d;
      }
    }
    if (k > z) continue;
    double fa = 1.0 - a;
    for (int f = 0; f < z - k; ++f) fa *= a;
    total += p * fa;
  }
  return total;
}

inline double loss(int x, int delta, double under, double over) {
  return delta < x ? under * (x - delta) : over * (delta - x);
}

struct Bayes {
  int estimate;
  double risk;
};

inline bool tieBreakLess(double a, double b) {
  return a < b - 1e-12 * std::max(1.0, std::abs(b));
}

inline Bayes bayes(const std::vector<double>& p, double under, double over) {
  Bayes best{-1, std::numeric_limits<double>::infinity()};
  for (int delta = 0; delta < static_cast<int>(p.size()); ++delta) {
    double e = 0.0;
    for (int x = 0; x < static_cast<int>(p.size()); ++x) e += p[x] * loss(x, delta, under, over);
    if (best.estimate < 0 || tieBreakLess(e, best.risk)) best = {delta, e};
  }
  return best;
}

inline std::vector<double> posterior(const Cell& c, const Sensor& s, int z, std::size_t j) {
  std::vector<double> p(c.targets.size());
  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    p[x] = likelihood(z, static_cast<int>(x), s.detection[j], s.false_alarm[j]) * c.targets[x];
    total += p[x];
  }
  if (total <= 0.0) return {};
  for (double& v : p) v /= total;
  return p;
}

inline double condRisk(const Cell& c, const Sensor& s, int z, std::size_t j) {
  auto p = posterior(c, s, z, j);
  return bayes(p, c.under, c.over).risk;
}

inline double currentRisk(const Cell& c) {
  double rho = 0.0;
  for (std::size_t j = 0; j < c.env.size(); ++j) rho += c.env[j] * bayes(c.targets, c.under, c.over).risk;
  return rho;
}

inline std::vector<double> envPosterior(const Cell& c, const Sensor& s, std::size_t y) {
  std::vector<double> p(c.env.size());
  double total = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = s.confusion[j][y] * c.env[j];
    total += p[j];
  }
  for (double& v : p) v /= total;
  return p;
}

inline double joint(const Cell& c, const Sensor& s, int z, std::size_t y) {
  double total = 0.0;
  for (std::size_t x = 0; x < c.targets.size(); ++x) {
    for (std::size_t j = 0; j < c.env.size(); ++j) {
      total += likelihood(z, static_cast<int>(x), s.detection[j], s.false_alarm[j]) *
               s.confusion[j][y] * c.targets[x] * c.env[j];
    }
  }
  return total;
}

// Index ordering: estimate d under-states truth e when d <= e.
inline std::size_t envEstimate(const Cell& c, const Sensor& s, int z, std::size_t y) {
  const auto post = envPosterior(c, s, y);
  const std::size_t m = c.env.size();
  std::vector<double> r(m);
  for (std::size_t j = 0; j < m; ++j) r[j] = condRisk(c, s, z, j);
  std::size_t best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < m; ++d) {
    double e = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      e += post[j] * (d <= j ? c.env_under : c.env_over) * std::abs(r[j] - r[d]);
    }
    if (d == 0 || tieBreakLess(e, best_loss)) {
      best = d;
      best_loss = e;
    }
  }
  return best;
}

inline double anticipatedRisk(const Cell& c, const Sensor& s, int z_max) {
  double r = 0.0;
  for (int z = 0; z <= z_max; ++z) {
    for (std::size_t y = 0; y < c.env.size(); ++y) {
      const double pzy = joint(c, s, z, y);
      if (pzy <= 0.0) continue;
      r += pzy * condRisk(c, s, z, envEstimate(c, s, z, y));
    }
  }
  return r;
}

// Planning oracles. Headings: 0 idle, 1 open (single-cell leg), 2 left, 3 right.
struct PlanGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> benefit;      // row-major
  std::vector<std::uint8_t> searched;
};

inline int moveCost(int cols, int pos, int heading, int q) {
  const int pr = pos / cols, pc = pos % cols, qr = q / cols, qc = q % cols;
  if (pr == qr && qc == pc + 1 && (heading == 1 || heading == 3)) return 1;
  if (pr == qr && qc == pc - 1 && (heading == 1 || heading == 2)) return 1;
  return std::abs(pr - qr) + std::abs(pc - qc) + 1;
}

inline int headingAfter(int cols, int pos, int heading, int q) {
  if (q != pos && moveCost(cols, pos, heading, q) == 1) return q > pos ? 3 : 2;
  return 1;
}

// Most reward collectable from (pos, heading) with `budget`, searching only
// cells outside `taken` and not already searched. Exhaustive over all cell
// sequences via a minimum-cost table on (cell set, position, heading).
inline double bestCompletion(const PlanGrid& g, std::uint32_t taken, int pos, int heading,
                             int budget) {
  const int k = g.rows * g.cols;
  const std::size_t sets = std::size_t{1} << k;
  const int inf = std::numeric_limits<int>::max();
  std::vector<int> cost(sets * static_cast<std::size_t>(k + 1) * 4, inf);
  auto at = [&](std::uint32_t m, int p, int h) -> int& {
    return cost[(static_cast<std::size_t>(m) * static_cast<std::size_t>(k + 1) +
                 static_cast<std::size_t>(p)) * 4 + static_cast<std::size_t>(h)];
  };
  at(taken, pos, heading) = 0;
  double best = 0.0;
  for (std::uint32_t m = 0; m < sets; ++m) {
    if ((m & taken) != taken) continue;
    double gained = 0.0;
    for (int i = 0; i < k; ++i) {
      if ((m >> i & 1u) && !(taken >> i & 1u)) gained += g.benefit[static_cast<std::size_t>(i)];
    }
    for (int p = 0; p < k; ++p) {
      for (int h = 0; h < 4; ++h) {
        const int c = at(m, p, h);
        if (c == inf) continue;
        best = std::max(best, gained);
        for (int q = 0; q < k; ++q) {
          if ((m >> q & 1u) || g.searched[static_cast<std::size_t>(q)]) continue;
          const int nc = c + moveCost(g.cols, p, h, q);
          if (nc > budget) continue;
          int& slot = at(m | (1u << q), q, headingAfter(g.cols, p, h, q));
          slot = std::min(slot, nc);
        }
      }
    }
  }
  return best;
}

// Best open row tour starting on `start` with the vehicle at column 0: the
// start row costs cols to sweep, each later row cols + |i - j|.
inline double bestRowTour(const std::vector<double>& row_reward, int cols, int start, int budget) {
  if (budget < cols) return 0.0;
  const int n = static_cast<int>(row_reward.size());
  double best = row_reward[static_cast<std::size_t>(start)];
  std::vector<int> path{start};
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  used[static_cast<std::size_t>(start)] = true;
  auto dfs = [&](auto&& self, int cost, double reward) -> void {
    best = std::max(best, reward);
    for (int v = 0; v < n; ++v) {
      if (used[static_cast<std::size_t>(v)]) continue;
      const int nc = cost + cols + std::abs(v - path.back());
      if (nc > budget) continue;
      used[static_cast<std::size_t>(v)] = true;
      path.push_back(v);
      self(self, nc, reward + row_reward[static_cast<std::size_t>(v)]);
      path.pop_back();
      used[static_cast<std::size_t>(v)] = false;
    }
  };
  dfs(dfs, cols, best);
  return best;
}

inline double knapsack01(const std::vector<double>& value, const std::vector<int>& weight,
                         int capacity) {
  const std::size_t n = value.size();
  double best = 0.0;
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    int w = 0;
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (m >> i & 1u) {
        w += weight[i];
        v += value[i];
      }
    }
    if (w <= capacity) best = std::max(best, v);
  }
  return best;
}

}  // namespace oracle

#endif  // RISKSCOUT_TESTS_ORACLES_HPP_
