#ifndef RISKSCOUT_SIM_HPP_
#define RISKSCOUT_SIM_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "riskscout/belief.hpp"
#include "riskscout/envmap.hpp"
#include "riskscout/plan.hpp"
#include "riskscout/planner_exact.hpp"
#include "riskscout/planner_orienteering.hpp"

namespace riskscout {

// ---------------------------------------------------------------------------
// Random streams. Every draw comes from a std::mt19937_64 whose seed is a
// SplitMix64 hash of (run seed, purpose, cell, visit), so the draws for one
// cell never depend on which planner ran or in which order cells were visited.

std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Index drawn from a probability vector.
  std::size_t categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Scenario and ground truth.

struct Region {
  std::string name;
  int row0 = 0;
  int col0 = 0;
  int rows = 0;
  int cols = 0;
  std::vector<double> env;  // environment prior shared by the region's cells
};

struct Scenario {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<EnvDistribution> env_priors;  // row-major
  CountDistribution target_prior = CountDistribution::uniform(3);
  SensorSuite sensor = SensorSuite::standard();
  LossModel loss;
  Cell start;

  void validate() const;
};

// The six-region 15 x 15 comparison area with the vehicle at (0, 0).
std::vector<Region> standardRegions();
Scenario regionScenario(int rows, int cols, const std::vector<Region>& regions);
Scenario standardScenario();

// Synthetic return raster for the large-map run: a bright-clutter band
// across the middle rows, dim patches, and open background elsewhere.
ReturnRaster syntheticHarborRaster(std::size_t rows, std::size_t cols, std::uint64_t seed);
// 51 x 65 cells from a 153 x 195 raster, vehicle in the bottom-left corner.
Scenario harborScenario(std::uint64_t seed, double smoothing = 0.1);

struct Scene {
  Grid<std::uint8_t> env;  // true class index per cell
  Grid<int> counts;        // true target count per cell
  std::uint64_t seed = 0;
};

Scene sampleScene(const Scenario& scenario, std::uint64_t seed);

// Seed of scene `index` in a run seeded with `seed`; shared by every planner
// and mission length.
std::uint64_t sceneSeed(std::uint64_t seed, std::size_t index);

struct Measurement {
  int z = 0;
  EnvIndex y = 0;
  bool operator==(const Measurement&) const = default;
};

// z: binomial detections of the x targets plus geometric false alarms;
// y: drawn from the confusion row of the true class.
Measurement simulateMeasurement(int x, EnvIndex env, const SensorSuite& sensor, Stream& stream);

// The `visit`-th measurement of `cell` in `scene`.
Measurement measureCell(const Scene& scene, const SensorSuite& sensor, Cell cell, int visit = 0);

// ---------------------------------------------------------------------------
// Planning inside the loop.

enum class PlannerKind { kExact, kOrienteering };

const char* plannerName(PlannerKind kind);

struct PlannerSettings {
  PlannerKind kind = PlannerKind::kOrienteering;
  std::uint64_t beta = kDefaultIterationCap;
  ExactOptions exact;
};

struct PlanOutcome {
  Plan plan;
  std::uint64_t expansions = 0;
  bool capped = false;
  double planning_ms = 0.0;
  bool reused = false;  // taken from a PlanCache instead of being recomputed
};

PlanOutcome runPlanner(const PlannerSettings& settings, const BenefitGrid& grid, int budget,
                       const VehicleState& state);

// Thread-safe memo of planner results keyed by the complete planner input.
// Unsearched benefits never change during a mission, so scenes of one
// scenario repeatedly pose identical planning problems.
class PlanCache {
 public:
  PlanCache();
  ~PlanCache();
  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  PlanOutcome plan(const PlannerSettings& settings, const BenefitGrid& grid, int budget,
                   const VehicleState& state);
  std::size_t size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Missions.

struct MissionSetup {
  std::vector<CellBelief> beliefs;  // row-major priors
  BenefitGrid grid;                 // pre-mission benefit and risk
  double total_prior_risk = 0.0;
};

MissionSetup prepareMission(const Scenario& scenario);

struct CellObservation {
  Cell cell;
  Measurement measurement;
  std::vector<double> targets;  // posterior over counts
  std::vector<double> env;      // posterior over classes
  bool operator==(const CellObservation&) const = default;
};

struct ReplanRecord {
  Plan plan;
  Leg executed;
  int leg_cost = 0;
  std::vector<CellObservation> observations;
  int budget_remaining = 0;
  std::uint64_t expansions = 0;
  bool capped = false;
  double planning_ms = 0.0;
  bool reused = false;
  bool operator==(const ReplanRecord&) const = default;
};

struct MissionRecord {
  PlannerKind planner = PlannerKind::kOrienteering;
  int mission_length = 0;
  std::uint64_t scene_seed = 0;
  std::vector<ReplanRecord> replans;
  int budget_spent = 0;
  double planned_reward = 0.0;      // pre-mission benefit summed over the flown path
  double realized_reduction = 0.0;  // prior risk minus posterior risk over the flown path
  double total_prior_risk = 0.0;
  double performance = 0.0;           // planned_reward / total_prior_risk
  double realized_performance = 0.0;  // realized_reduction / total_prior_risk
  bool operator==(const MissionRecord&) const = default;
};

// Plan, fly the first leg, update the searched cells, replan with what is
// left of the budget, until the planner returns nothing.
MissionRecord runReplanLoop(const PlannerSettings& settings, const Scenario& scenario,
                            const MissionSetup& setup, const Scene& scene, int mission_length,
                            PlanCache* cache = nullptr);

// Mean of the per-mission normalized planned risk reduction.
double normalizedPerformance(const std::vector<MissionRecord>& records);

// ---------------------------------------------------------------------------
// Monte Carlo comparison.

struct MonteCarloConfig {
  Scenario scenario = standardScenario();
  std::vector<int> mission_lengths{50, 60, 70, 80, 90, 100, 110};
  std::vector<PlannerKind> planners{PlannerKind::kExact, PlannerKind::kOrienteering};
  std::uint64_t beta = kDefaultIterationCap;
  ExactOptions exact;
  int scenes = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: take RISKSCOUT_THREADS or the hardware count
  bool reuse_plans = true;
};

struct SummaryRow {
  int mission_length = 0;
  PlannerKind planner = PlannerKind::kOrienteering;
  double mean_perf = 0.0;
  double sd_perf = 0.0;
  double mean_time_ms = 0.0;  // per replan
  double sd_time_ms = 0.0;
  double mean_realized = 0.0;
  int scenes = 0;
  int replans = 0;
};

struct MonteCarloResult {
  std::vector<SummaryRow> summary;     // mission length major, planner minor
  std::vector<MissionRecord> trials;  // same order, scenes innermost
};

MonteCarloResult monteCarloCompare(const MonteCarloConfig& config);

// RISKSCOUT_THREADS when set to a positive integer, else the hardware count.
int defaultThreadCount();

// Runs task(i) for i in [0, count) on up to `threads` workers.
void parallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

}  // namespace riskscout

#endif  // RISKSCOUT_SIM_HPP_
