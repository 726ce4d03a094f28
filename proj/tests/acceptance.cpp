// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any
// fails. Runtime limits are part of each criterion.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "riskscout/cli.hpp"
#include "riskscout/io.hpp"
#include "riskscout/planner_exact.hpp"
#include "riskscout/planner_orienteering.hpp"
#include "riskscout/sim.hpp"

using namespace riskscout;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

oracle::Sensor toOracle(const SensorSuite& s) {
  return {s.detections(), s.falseAlarms(), s.confusionMatrix()};
}

oracle::Cell toOracle(const CellBelief& b) {
  return {std::vector<double>(b.targets.probs().begin(), b.targets.probs().end()),
          std::vector<double>(b.env.probs().begin(), b.env.probs().end()),
          b.loss.under, b.loss.over, b.loss.env_under, b.loss.env_over};
}

oracle::PlanGrid toOracle(const BenefitGrid& g) {
  return {static_cast<int>(g.rows()), static_cast<int>(g.cols()), g.benefit.data(), g.searched.data()};
}

std::vector<double> randomSimplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(n);
  double total = 0.0;
  for (double& x : v) total += (x = e(rng));
  for (double& x : v) x /= total;
  return v;
}

int headingCode(Heading h) { return static_cast<int>(h); }

BenefitGrid randomGrid(std::mt19937_64& rng, int rows, int cols) {
  BenefitGrid g(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& b : g.benefit) b = u(rng) < 0.1 ? 0.0 : u(rng);
  for (auto& s : g.searched) s = u(rng) < 0.15;
  return g;
}

BenefitGrid rowGrid(const std::vector<double>& rewards, int cols) {
  BenefitGrid g(rewards.size(), static_cast<std::size_t>(cols));
  for (std::size_t r = 0; r < rewards.size(); ++r) {
    for (int c = 0; c < cols; ++c) g.benefit(r, static_cast<std::size_t>(c)) = rewards[r] / cols;
  }
  return g;
}

// ---------------------------------------------------------------------------

Outcome likelihoodNormalization() {
  const SensorSuite s = SensorSuite::standard();
  const int z_max = observationCaps(s, 5).z_max;
  double worst = 0.0;
  for (int x = 0; x <= 5; ++x) {
    for (EnvIndex j = 0; j < 3; ++j) {
      double total = 0.0;
      for (int z = 0; z <= z_max; ++z) total += obsLikelihood(z, x, j, s);
      worst = std::max(worst, std::abs(1.0 - total));
    }
  }
  return {worst <= 1e-9, fmt("z_max=%d, max |1 - sum| = %.2e", z_max, worst)};
}

Outcome beliefOracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> cost(0.2, 4.0);
  const SensorSuite s = SensorSuite::standard();
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const CellBelief b{CountDistribution(randomSimplex(rng, 2 + trial % 5)), EnvDistribution(randomSimplex(rng, 3)),
                       {cost(rng), cost(rng), cost(rng), cost(rng), EnvOrdering::kByIndex}};
    const CellValue v = cellBenefit(b, s);
    const int z_max = observationCaps(s, b.targets.maxCount()).z_max;
    const double cur = oracle::currentRisk(toOracle(b));
    const double ant = oracle::anticipatedRisk(toOracle(b), toOracle(s), z_max);
    worst = std::max({worst, std::abs(v.current_risk - cur), std::abs(currentRisk(b, s) - cur),
                      std::abs(v.anticipated_risk - ant), std::abs(v.benefit - (cur - ant))});
  }
  return {worst <= 1e-9, fmt("20 random cells, max deviation %.2e", worst)};
}

Outcome plannerOracle() {
  std::mt19937_64 rng(31337);
  int exact_bad = 0, orient_bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int rows = std::uniform_int_distribution<int>(1, 4)(rng);
    const int cols = std::uniform_int_distribution<int>(1, 4)(rng);
    const BenefitGrid g = randomGrid(rng, rows, cols);
    const VehicleState start{{std::uniform_int_distribution<int>(0, rows - 1)(rng),
                              std::uniform_int_distribution<int>(0, cols - 1)(rng)},
                             Heading::kIdle};
    const int budget = std::uniform_int_distribution<int>(1, 12)(rng);
    const double truth = oracle::bestCompletion(toOracle(g), 0, start.cell.row * cols + start.cell.col,
                                                headingCode(start.heading), budget);
    const ExactResult r = planExact(g, budget, start);
    const double d = std::abs(r.plan.expected_reward - truth);
    worst = std::max(worst, d);
    if (d > 1e-9) ++exact_bad;
  }
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 7)(rng);
    const int cols = std::uniform_int_distribution<int>(1, 6)(rng);
    const int start = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const int budget = std::uniform_int_distribution<int>(0, n * (cols + 2))(rng);
    std::vector<double> rewards(static_cast<std::size_t>(n));
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (double& x : rewards) x = u(rng) < 1.0 ? 0.0 : u(rng);
    const RowGraph rg = buildRowGraph(rowGrid(rewards, cols), start);
    const OrienteeringResult r = planOrienteering(rg, budget, kUnlimitedIterations);
    const double d = std::abs(r.tour.total_reward - oracle::bestRowTour(rewards, cols, start, budget));
    worst = std::max(worst, d);
    if (d > 1e-9 || r.capped) ++orient_bad;
  }
  return {exact_bad == 0 && orient_bad == 0,
          fmt("exact mismatches %d/50, orienteering mismatches %d/50, max deviation %.2e", exact_bad,
              orient_bad, worst)};
}

Outcome boundAdmissibility() {
  std::mt19937_64 rng(4242);
  int knapsack_bad = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 8)(rng);
    const int cols = std::uniform_int_distribution<int>(1, 6)(rng);
    std::vector<double> rewards(static_cast<std::size_t>(n));
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (double& x : rewards) x = u(rng) < 1.0 ? 0.0 : u(rng);
    const RowGraph g = buildRowGraph(rowGrid(rewards, cols), 0);
    const int capacity = std::uniform_int_distribution<int>(0, n * (cols + 2))(rng);
    const double best = oracle::knapsack01(rewards, std::vector<int>(rewards.size(), g.weight(0)), capacity);
    if (knapsackUpperBound(g, capacity, Tour{}) < best - 1e-12) ++knapsack_bad;
  }
  // Exact-planner bounds against the optimal completion of random prefixes.
  int exact_bad = 0, checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = std::uniform_int_distribution<int>(1, 4)(rng);
    const int cols = std::uniform_int_distribution<int>(1, 4)(rng);
    const BenefitGrid g = randomGrid(rng, rows, cols);
    const VehicleState start{{std::uniform_int_distribution<int>(0, rows - 1)(rng),
                              std::uniform_int_distribution<int>(0, cols - 1)(rng)},
                             Heading::kIdle};
    const int budget = std::uniform_int_distribution<int>(1, 10)(rng);
    std::vector<Cell> prefix;
    VehicleState state = start;
    int used = 0;
    std::uint32_t taken = 0;
    const int steps = std::uniform_int_distribution<int>(0, 4)(rng);
    for (int s = 0; s < steps; ++s) {
      const int q = std::uniform_int_distribution<int>(0, rows * cols - 1)(rng);
      const Cell c{q / cols, q % cols};
      if (!g.available(c.row, c.col) || (taken >> q & 1u)) continue;
      const int cost = stepCost(state, c);
      if (used + cost > budget) continue;
      used += cost;
      state = advance(state, c);
      taken |= 1u << q;
      prefix.push_back(c);
    }
    const Plan partial = planFromCells(g, start, prefix);
    const double completion =
        partial.expected_reward + oracle::bestCompletion(toOracle(g), taken, state.cell.row * cols + state.cell.col,
                                                         headingCode(state.heading), budget - used);
    ++checked;
    if (upperBound(g, budget, partial) < completion - 1e-12) ++exact_bad;
    if (relaxedUpperBound(g, budget, start, partial) < completion - 1e-12) ++exact_bad;
  }
  return {knapsack_bad == 0 && exact_bad == 0,
          fmt("knapsack violations %d/10000, exact-bound violations %d over %d prefixes", knapsack_bad, exact_bad,
              checked)};
}

Outcome searchPerformance() {
  MonteCarloConfig config;
  config.mission_lengths = {50, 70, 90, 100, 110};
  config.scenes = 100;
  config.seed = 1;
  const MonteCarloResult r = monteCarloCompare(config);
  // rows: (H index) * 2 + planner index
  auto row = [&](std::size_t h, std::size_t p) -> const SummaryRow& { return r.summary[h * 2 + p]; };
  bool increasing = true;
  const std::size_t sweep[] = {0, 1, 2, 4};
  for (std::size_t p = 0; p < 2; ++p) {
    for (std::size_t k = 1; k < 4; ++k) {
      increasing = increasing && row(sweep[k], p).mean_perf > row(sweep[k - 1], p).mean_perf;
    }
  }
  bool faster = true;
  for (std::size_t h : {std::size_t{2}, std::size_t{3}, std::size_t{4}}) {
    faster = faster && row(h, 1).mean_time_ms < row(h, 0).mean_time_ms;
  }
  int paired_bad = 0;
  const std::size_t scenes = static_cast<std::size_t>(config.scenes);
  for (std::size_t h = 0; h < config.mission_lengths.size(); ++h) {
    for (std::size_t s = 0; s < scenes; ++s) {
      if (r.trials[(2 * h) * scenes + s].planned_reward < r.trials[(2 * h + 1) * scenes + s].planned_reward - 1e-9) {
        ++paired_bad;
      }
    }
  }
  const double at100 = row(3, 0).mean_perf, at100o = row(3, 1).mean_perf;
  const bool band = at100 >= 0.10 && at100 <= 0.40 && at100o >= 0.10 && at100o <= 0.40;
  std::string perf;
  for (std::size_t h = 0; h < config.mission_lengths.size(); ++h) {
    perf += fmt(" H=%d %.3f/%.3f", config.mission_lengths[h], row(h, 0).mean_perf, row(h, 1).mean_perf);
  }
  return {increasing && faster && paired_bad == 0 && band,
          fmt("exact/orienteering perf:%s; time at H=90 %.1f ms vs %.3f ms; paired violations %d; "
              "increasing=%d faster=%d band=%d",
              perf.c_str(), row(2, 0).mean_time_ms, row(2, 1).mean_time_ms, paired_bad, increasing, faster, band)};
}

Outcome largeMap() {
  const Scenario s = harborScenario(7);
  const MissionSetup setup = prepareMission(s);
  const VehicleState start{s.start, Heading::kIdle};
  const auto t0 = std::chrono::steady_clock::now();
  const RowGraph g = buildRowGraph(setup.grid, start);
  const OrienteeringResult first = planOrienteering(g, 1500, 1'000'000);
  const double first_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  PlannerSettings settings{PlannerKind::kOrienteering, 1'000'000, {}};
  const MissionRecord m = runReplanLoop(settings, s, setup, sampleScene(s, sceneSeed(7, 0)), 1500);
  std::set<int> rows;
  for (const ReplanRecord& step : m.replans) rows.insert(step.executed.row);
  const int n = static_cast<int>(rows.size());
  return {s.rows == 51 && s.cols == 65 && first_s < 10.0 && n >= 15 && n <= 30,
          fmt("%zux%zu map, initial plan %.2f s (%zu rows planned), mission covered %d rows, spent %d of 1500",
              s.rows, s.cols, first_s, first.tour.vertices.size(), n, m.budget_spent)};
}

Outcome valueOfInformation() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> cost(0.1, 5.0), prob(0.05, 0.95);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const SensorSuite s({prob(rng), prob(rng), prob(rng)}, {prob(rng), prob(rng), prob(rng)},
                        {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    const CellBelief b{CountDistribution(randomSimplex(rng, 1 + trial % 5)), EnvDistribution(randomSimplex(rng, 3)),
                       {cost(rng), cost(rng), cost(rng), cost(rng), EnvOrdering::kByIndex}};
    worst = std::min(worst, cellBenefit(b, s).benefit);
  }
  return {worst >= -1e-12, fmt("1000 random beliefs, smallest benefit %.3e", worst)};
}

Outcome envmapPipeline() {
  const bool classes = classify(3.0) == EnvClass::kDifficult && classify(-1.0) == EnvClass::kModerate &&
                       classify(0.0) == EnvClass::kEasy;
  std::mt19937_64 rng(8);
  std::gamma_distribution<double> gamma(2.0, 1.5);
  Grid<double> raw(60, 80);
  for (double& v : raw) v = gamma(rng);
  const Grid<double> phi = whiten(medianDownsample(raw, 3));
  double worst_mean = 0.0, worst_var = 0.0;
  for (std::size_t m = 0; m < phi.rows(); ++m) {
    double mean = 0.0, var = 0.0;
    for (std::size_t n = 0; n < phi.cols(); ++n) mean += phi(m, n) / static_cast<double>(phi.cols());
    for (std::size_t n = 0; n < phi.cols(); ++n) var += (phi(m, n) - mean) * (phi(m, n) - mean);
    var /= static_cast<double>(phi.cols());
    worst_mean = std::max(worst_mean, std::abs(mean));
    worst_var = std::max(worst_var, std::abs(var - 1.0));
  }
  return {classes && worst_mean <= 1e-9 && worst_var <= 1e-9,
          fmt("thresholds %s; max |mean| %.1e, max |var - 1| %.1e", classes ? "ok" : "wrong", worst_mean, worst_var)};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "riskscout_acceptance_determinism";
  fs::remove_all(dir);
  auto run = [&](const std::string& name, const std::string& threads) {
    const std::string out = (dir / name).string();
    const char* argv[] = {"riskscout", "simulate",  "--planner", "exact",   "--budget", "100",
                          "--seed",    "5",         "--scenes",  "8",       "--threads", threads.c_str(),
                          "--out",     out.c_str()};
    std::ostringstream sink;
    return runCli(static_cast<int>(std::size(argv)), argv, sink, sink);
  };
  const int codes = run("a", "1") + run("b", "1") + run("c", "8");
  bool same = codes == 0;
  std::size_t bytes = 0;
  for (const char* f : {"mission_record.json", "missions.jsonl"}) {
    if (!same) break;
    const std::string a = readFile(dir / "a" / f);
    bytes += a.size();
    same = a == readFile(dir / "b" / f) && a == readFile(dir / "c" / f);
  }
  fs::remove_all(dir);
  return {same, fmt("exit codes sum %d; %zu bytes compared across two 1-thread runs and one 8-thread run", codes,
                    bytes)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> check;
  };
  const Criterion criteria[] = {
      {1, "likelihood normalization", 1.0, likelihoodNormalization},
      {2, "belief oracle equivalence", 10.0, beliefOracle},
      {3, "planner oracle equivalence", 60.0, plannerOracle},
      {4, "bound admissibility", 30.0, boundAdmissibility},
      {5, "search performance grows with mission length", 900.0, searchPerformance},
      {6, "large-map orienteering run", 300.0, largeMap},
      {7, "value of information with identity confusion", 5.0, valueOfInformation},
      {8, "environment map pipeline", 1.0, envmapPipeline},
      {9, "simulate output is deterministic", 600.0, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && s < c.limit_s;
    failed += !pass;
    std::printf("%s %d. %s: %s [%.2f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), s,
                c.limit_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
