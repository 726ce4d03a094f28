#include "riskscout/sim.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "riskscout/error.hpp"

namespace riskscout {

namespace {

// Purposes mixed into stream seeds.
constexpr std::uint64_t kSceneTag = 0x5CE9E;
constexpr std::uint64_t kMeasureTag = 0x3EA5;
constexpr std::uint64_t kRasterTag = 0x4A57;
constexpr std::uint64_t kSceneIndexTag = 0x1D8;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

// Sample standard deviation; 0 for fewer than two values.
MeanSd meanSd(const std::vector<double>& v) {
  MeanSd out;
  if (v.empty()) return out;
  out.mean = sum(v) / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return out;
}

}  // namespace

std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

std::size_t Stream::categorical(std::span<const double> probs) {
  const double u = uniform() * sum(probs);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc && probs[i] > 0.0) return i;
  }
  // Rounding left u at the top; fall back to the last class with mass.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  throw std::invalid_argument("categorical draw from an all-zero vector");
}

// ---------------------------------------------------------------------------

void Scenario::validate() const {
  if (rows == 0 || cols == 0) throw std::invalid_argument("scenario grid must be nonempty");
  if (env_priors.size() != rows * cols) {
    throw std::invalid_argument("scenario needs one environment prior per cell");
  }
  for (const auto& p : env_priors) {
    if (p.classes() != sensor.classes()) {
      throw std::invalid_argument("environment prior and sensor disagree on class count");
    }
  }
  loss.validate();
  if (start.row < 0 || start.col < 0 || start.row >= static_cast<int>(rows) ||
      start.col >= static_cast<int>(cols)) {
    throw std::invalid_argument("start cell lies outside the scenario grid");
  }
}

std::vector<Region> standardRegions() {
  return {
      {"A1", 0, 5, 5, 10, {0.95, 0.05, 0.00}},
      {"A2", 5, 0, 5, 10, {0.85, 0.10, 0.05}},
      {"A3", 5, 10, 5, 5, {0.10, 0.10, 0.80}},
      {"A4", 10, 8, 5, 7, {0.30, 0.40, 0.30}},
      {"A5", 0, 0, 5, 5, {0.00, 0.10, 0.90}},
      {"A6", 10, 0, 5, 8, {0.10, 0.65, 0.25}},
  };
}

Scenario regionScenario(int rows, int cols, const std::vector<Region>& regions) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("scenario grid must be nonempty");
  Scenario s;
  s.rows = static_cast<std::size_t>(rows);
  s.cols = static_cast<std::size_t>(cols);
  std::vector<const Region*> owner(s.rows * s.cols, nullptr);
  for (const Region& reg : regions) {
    for (int r = reg.row0; r < reg.row0 + reg.rows; ++r) {
      for (int c = reg.col0; c < reg.col0 + reg.cols; ++c) {
        if (r < 0 || c < 0 || r >= rows || c >= cols) {
          throw std::invalid_argument("region " + reg.name + " leaves the grid");
        }
        auto& slot = owner[static_cast<std::size_t>(r * cols + c)];
        if (slot) throw std::invalid_argument("regions " + slot->name + " and " + reg.name + " overlap");
        slot = &reg;
      }
    }
  }
  s.env_priors.reserve(owner.size());
  for (std::size_t i = 0; i < owner.size(); ++i) {
    if (!owner[i]) {
      throw std::invalid_argument("cell " + std::to_string(i) + " belongs to no region");
    }
    s.env_priors.emplace_back(owner[i]->env);
  }
  return s;
}

Scenario standardScenario() { return regionScenario(15, 15, standardRegions()); }

ReturnRaster syntheticHarborRaster(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  // Features are laid out on a coarse lattice three raw pixels wide so that
  // they survive a 3 x 3 median.
  const std::size_t cr = std::max<std::size_t>(1, rows / 3), cc = std::max<std::size_t>(1, cols / 3);
  Grid<double> coarse(cr, cc, 1.0);
  Stream layout(mixSeed(seed, kRasterTag, 0));
  auto blob = [&](std::size_t r0, std::size_t c0, std::size_t h, std::size_t w, double v) {
    for (std::size_t r = r0; r < std::min(cr, r0 + h); ++r) {
      for (std::size_t c = c0; c < std::min(cc, c0 + w); ++c) coarse(r, c) = v;
    }
  };
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(layout.uniform() * n); };
  const std::size_t band_lo = cr * 27 / 100, band_hi = cr * 72 / 100;
  // Dense bright clutter across the middle band.
  for (std::size_t r = band_lo; r < band_hi; r += 2) {
    for (std::size_t k = 0; k < cc / 8 + 1; ++k) blob(r, pick(cc), 2, 2 + pick(3), 4.0);
  }
  // Dim patches.
  for (int k = 0; k < 6; ++k) blob(pick(cr), pick(cc), 3 + pick(4), 6 + pick(10), 0.5);
  // A few isolated scatterers in every row so no row is pure background.
  for (std::size_t r = 0; r < cr; ++r) blob(r, pick(cc), 1, 1, 4.0);

  ReturnRaster raster(rows, cols);
  Stream speckle(mixSeed(seed, kRasterTag, 1));
  for (std::size_t m = 0; m < rows; ++m) {
    for (std::size_t n = 0; n < cols; ++n) {
      const double base = coarse(std::min(cr - 1, m / 3), std::min(cc - 1, n / 3));
      raster(m, n) = base * (0.95 + 0.1 * speckle.uniform());
    }
  }
  return raster;
}

Scenario harborScenario(std::uint64_t seed, double smoothing) {
  const PerformanceMap pm =
      buildPerformanceMap(syntheticHarborRaster(153, 195, seed), 3, Thresholds{}, smoothing);
  Scenario s;
  s.rows = pm.phi.rows();
  s.cols = pm.phi.cols();
  s.env_priors = pm.priors;
  s.start = {static_cast<int>(s.rows) - 1, 0};
  return s;
}

Scene sampleScene(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  Scene scene{Grid<std::uint8_t>(scenario.rows, scenario.cols, 0),
              Grid<int>(scenario.rows, scenario.cols, 0), seed};
  for (std::size_t i = 0; i < scenario.rows * scenario.cols; ++i) {
    Stream stream(mixSeed(seed, kSceneTag, i));
    scene.env[i] = static_cast<std::uint8_t>(stream.categorical(scenario.env_priors[i].probs()));
    scene.counts[i] = static_cast<int>(stream.categorical(scenario.target_prior.probs()));
  }
  return scene;
}

std::uint64_t sceneSeed(std::uint64_t seed, std::size_t index) {
  return mixSeed(seed, kSceneIndexTag, index);
}

Measurement simulateMeasurement(int x, EnvIndex env, const SensorSuite& sensor, Stream& stream) {
  Measurement m;
  const double d = sensor.detection(env), a = sensor.falseAlarm(env);
  for (int k = 0; k < x; ++k) m.z += stream.uniform() < d ? 1 : 0;
  while (stream.uniform() < a) ++m.z;
  std::vector<double> row(sensor.classes());
  for (EnvIndex j = 0; j < row.size(); ++j) row[j] = sensor.confusion(env, j);
  m.y = stream.categorical(row);
  return m;
}

Measurement measureCell(const Scene& scene, const SensorSuite& sensor, Cell cell, int visit) {
  const std::size_t i = static_cast<std::size_t>(cell.row) * scene.env.cols() +
                        static_cast<std::size_t>(cell.col);
  Stream stream(mixSeed(scene.seed, kMeasureTag, (static_cast<std::uint64_t>(i) << 16) ^
                                                      static_cast<std::uint64_t>(visit)));
  return simulateMeasurement(scene.counts[i], scene.env[i], sensor, stream);
}

// ---------------------------------------------------------------------------

const char* plannerName(PlannerKind kind) {
  return kind == PlannerKind::kExact ? "exact" : "orienteering";
}

PlanOutcome runPlanner(const PlannerSettings& settings, const BenefitGrid& grid, int budget,
                       const VehicleState& state) {
  PlanOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  if (settings.kind == PlannerKind::kExact) {
    if (budget >= 1) {
      ExactResult r = planExact(grid, budget, state, settings.exact);
      out.plan = std::move(r.plan);
      out.expansions = r.expansions;
    }
  } else {
    const RowGraph g = buildRowGraph(grid, state);
    const OrienteeringResult r = planOrienteering(g, budget, settings.beta);
    out.plan = tourToPlan(r.tour, g, grid, state);
    out.expansions = r.expansions;
    out.capped = r.capped;
  }
  out.planning_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

struct PlanCache::Impl {
  mutable std::mutex mutex;
  std::map<std::vector<std::uint64_t>, PlanOutcome> entries;
};

PlanCache::PlanCache() : impl_(std::make_unique<Impl>()) {}
PlanCache::~PlanCache() = default;

PlanOutcome PlanCache::plan(const PlannerSettings& settings, const BenefitGrid& grid, int budget,
                            const VehicleState& state) {
  std::vector<std::uint64_t> key{
      static_cast<std::uint64_t>(settings.kind), settings.beta,
      static_cast<std::uint64_t>(settings.exact.bound),
      static_cast<std::uint64_t>(settings.exact.merge_duplicates), settings.exact.node_cap,
      static_cast<std::uint64_t>(budget), static_cast<std::uint64_t>(state.cell.row),
      static_cast<std::uint64_t>(state.cell.col), static_cast<std::uint64_t>(state.heading),
      grid.rows(), grid.cols()};
  key.reserve(key.size() + grid.benefit.size());
  for (std::size_t i = 0; i < grid.benefit.size(); ++i) {
    key.push_back(grid.searched[i] ? ~0ULL : std::bit_cast<std::uint64_t>(grid.benefit[i]));
  }
  {
    std::lock_guard lock(impl_->mutex);
    auto it = impl_->entries.find(key);
    if (it != impl_->entries.end()) {
      PlanOutcome hit = it->second;
      hit.reused = true;
      return hit;
    }
  }
  PlanOutcome fresh = runPlanner(settings, grid, budget, state);
  std::lock_guard lock(impl_->mutex);
  impl_->entries.emplace(std::move(key), fresh);
  return fresh;
}

std::size_t PlanCache::size() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->entries.size();
}

// ---------------------------------------------------------------------------

MissionSetup prepareMission(const Scenario& scenario) {
  scenario.validate();
  MissionSetup setup;
  setup.grid = BenefitGrid(scenario.rows, scenario.cols);
  setup.beliefs.reserve(scenario.env_priors.size());
  // Many cells share a prior; evaluate each distinct one once.
  std::map<std::vector<double>, CellValue> seen;
  for (std::size_t i = 0; i < scenario.env_priors.size(); ++i) {
    CellBelief b{scenario.target_prior, scenario.env_priors[i], scenario.loss};
    const std::vector<double> key(b.env.probs().begin(), b.env.probs().end());
    auto it = seen.find(key);
    if (it == seen.end()) it = seen.emplace(key, cellBenefit(b, scenario.sensor)).first;
    setup.grid.benefit[i] = it->second.benefit;
    setup.grid.current_risk[i] = it->second.current_risk;
    setup.total_prior_risk += it->second.current_risk;
    setup.beliefs.push_back(std::move(b));
  }
  return setup;
}

MissionRecord runReplanLoop(const PlannerSettings& settings, const Scenario& scenario,
                            const MissionSetup& setup, const Scene& scene, int mission_length,
                            PlanCache* cache) {
  if (mission_length < 1) throw std::invalid_argument("mission length must be at least 1");
  MissionRecord record;
  record.planner = settings.kind;
  record.mission_length = mission_length;
  record.scene_seed = scene.seed;
  record.total_prior_risk = setup.total_prior_risk;

  std::vector<CellBelief> beliefs = setup.beliefs;
  BenefitGrid grid = setup.grid;
  VehicleState state{scenario.start, Heading::kIdle};
  int budget = mission_length;

  while (budget > 0) {
    PlanOutcome outcome;
    try {
      outcome = cache ? cache->plan(settings, grid, budget, state)
                      : runPlanner(settings, grid, budget, state);
    } catch (const CapExceededError& e) {
      throw CapExceededError("replan " + std::to_string(record.replans.size()) + " of the " +
                             plannerName(settings.kind) + " mission (H=" +
                             std::to_string(mission_length) + "): " + e.what());
    }
    if (outcome.plan.empty()) break;

    ReplanRecord step;
    step.executed = outcome.plan.legs.front();
    step.leg_cost = legCost(state, step.executed);
    const int dir = step.executed.col_end >= step.executed.col_start ? 1 : -1;
    for (int c = step.executed.col_start;; c += dir) {
      const Cell cell{step.executed.row, c};
      const std::size_t i = static_cast<std::size_t>(cell.row) * grid.cols() +
                            static_cast<std::size_t>(cell.col);
      const Measurement m = measureCell(scene, scenario.sensor, cell);
      CellBelief& b = beliefs[i];
      CellBelief updated{marginalPosteriorTargets(b, m.z, m.y, scenario.sensor),
                         posteriorEnv(b.env, m.y, scenario.sensor), b.loss};
      b = std::move(updated);
      const double posterior_risk = currentRisk(b, scenario.sensor);
      record.planned_reward += setup.grid.benefit[i];
      record.realized_reduction += setup.grid.current_risk[i] - posterior_risk;
      grid.current_risk[i] = posterior_risk;
      grid.benefit[i] = cellBenefit(b, scenario.sensor).benefit;
      grid.searched[i] = 1;
      step.observations.push_back({cell, m,
                                   std::vector<double>(b.targets.probs().begin(), b.targets.probs().end()),
                                   std::vector<double>(b.env.probs().begin(), b.env.probs().end())});
      if (c == step.executed.col_end) break;
    }
    state = stateAfter(state, {step.executed});
    budget -= step.leg_cost;
    record.budget_spent += step.leg_cost;
    step.budget_remaining = budget;
    step.expansions = outcome.expansions;
    step.capped = outcome.capped;
    step.planning_ms = outcome.planning_ms;
    step.reused = outcome.reused;
    step.plan = std::move(outcome.plan);
    record.replans.push_back(std::move(step));
  }
  if (record.total_prior_risk > 0.0) {
    record.performance = record.planned_reward / record.total_prior_risk;
    record.realized_performance = record.realized_reduction / record.total_prior_risk;
  }
  return record;
}

double normalizedPerformance(const std::vector<MissionRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no mission records");
  double total = 0.0;
  for (const MissionRecord& r : records) {
    if (!(r.total_prior_risk > 0.0)) {
      throw DegenerateDataError("total prior risk is zero; performance is undefined");
    }
    total += r.planned_reward / r.total_prior_risk;
  }
  return total / static_cast<double>(records.size());
}

// ---------------------------------------------------------------------------

int defaultThreadCount() {
  if (const char* env = std::getenv("RISKSCOUT_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(std::min<long>(n, 1024));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

MonteCarloResult monteCarloCompare(const MonteCarloConfig& config) {
  if (config.scenes < 1) throw std::invalid_argument("need at least one scene");
  if (config.mission_lengths.empty() || config.planners.empty()) {
    throw std::invalid_argument("need at least one mission length and one planner");
  }
  const MissionSetup setup = prepareMission(config.scenario);
  const auto scenes = static_cast<std::size_t>(config.scenes);
  const std::size_t cells = config.mission_lengths.size() * config.planners.size();

  MonteCarloResult result;
  result.trials.resize(cells * scenes);
  PlanCache cache;
  const int threads = config.threads > 0 ? config.threads : defaultThreadCount();
  parallelFor(result.trials.size(), threads, [&](std::size_t t) {
    const std::size_t scene_index = t % scenes;
    const std::size_t cell = t / scenes;
    const int length = config.mission_lengths[cell / config.planners.size()];
    PlannerSettings settings;
    settings.kind = config.planners[cell % config.planners.size()];
    settings.beta = config.beta;
    settings.exact = config.exact;
    // Scenes depend only on the seed and the scene index: every planner and
    // mission length sees the same ground truth and measurement streams.
    const Scene scene = sampleScene(config.scenario, sceneSeed(config.seed, scene_index));
    result.trials[t] = runReplanLoop(settings, config.scenario, setup, scene, length,
                                     config.reuse_plans ? &cache : nullptr);
  });

  for (std::size_t cell = 0; cell < cells; ++cell) {
    SummaryRow row;
    row.mission_length = config.mission_lengths[cell / config.planners.size()];
    row.planner = config.planners[cell % config.planners.size()];
    std::vector<double> perf, realized, times;
    for (std::size_t s = 0; s < scenes; ++s) {
      const MissionRecord& r = result.trials[cell * scenes + s];
      perf.push_back(r.performance);
      realized.push_back(r.realized_performance);
      for (const ReplanRecord& step : r.replans) times.push_back(step.planning_ms);
    }
    const MeanSd p = meanSd(perf), tm = meanSd(times);
    row.mean_perf = p.mean;
    row.sd_perf = p.sd;
    row.mean_time_ms = tm.mean;
    row.sd_time_ms = tm.sd;
    row.mean_realized = meanSd(realized).mean;
    row.scenes = config.scenes;
    row.replans = static_cast<int>(times.size());
    result.summary.push_back(row);
  }
  return result;
}

}  // namespace riskscout
