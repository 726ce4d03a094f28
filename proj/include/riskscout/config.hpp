#ifndef RISKSCOUT_CONFIG_HPP_
#define RISKSCOUT_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "riskscout/io.hpp"
#include "riskscout/sim.hpp"

namespace riskscout {

enum class GridSourceKind {
  kStandard,   // the six-region 15 x 15 comparison area
  kRegions,    // rectangles listed inline
  kPriorFile,  // prior-grid JSON written by `ingest`
  kHarbor,     // synthetic 51 x 65 map
};

struct GridSource {
  GridSourceKind kind = GridSourceKind::kStandard;
  int rows = 0;
  int cols = 0;
  std::vector<Region> regions;
  std::string path;
  std::uint64_t harbor_seed = 7;
  double harbor_smoothing = 0.1;
};

struct IngestSettings {
  int window = 3;
  Thresholds thresholds;
  double smoothing = 0.1;
  WhitenScope scope = WhitenScope::kDownRange;
};

// Everything a run needs. Every key of the JSON form is optional; absent
// keys keep these defaults and unknown keys are rejected.
struct ExperimentConfig {
  GridSource grid;
  std::optional<Cell> start;  // default: the source's own start cell
  SensorSuite sensor = SensorSuite::standard();
  LossModel loss;
  int x_max = 3;
  std::vector<double> target_prior;  // empty: uniform over 0..x_max
  std::vector<int> mission_lengths{50, 60, 70, 80, 90, 100, 110};
  int budget = 100;
  PlannerKind planner = PlannerKind::kOrienteering;
  std::uint64_t beta = kDefaultIterationCap;
  ExactOptions exact;
  int scenes = 100;          // scenes per (mission length, planner) in `compare`
  int simulate_scenes = 1;   // missions flown by `simulate`
  std::uint64_t seed = 1;
  int threads = 0;           // 0: RISKSCOUT_THREADS or the hardware count
  bool reuse_plans = true;
  bool include_timing = false;  // add planning times to mission-record JSON
  std::string out = "out";
  IngestSettings ingest;
};

// Parses and validates; errors are ParseError naming the offending field.
// Relative paths are resolved against `base_dir`.
ExperimentConfig configFromJson(const Json& j, const std::filesystem::path& base_dir = {});
Json configToJson(const ExperimentConfig& config);
ExperimentConfig loadConfig(const std::filesystem::path& path);

// Checks cross-field invariants that do not need the grid itself.
void validateConfig(const ExperimentConfig& config);

// Resolves the grid source (reading files when needed) and applies the
// sensor, loss, target prior and start cell.
Scenario buildScenario(const ExperimentConfig& config);

}  // namespace riskscout

#endif  // RISKSCOUT_CONFIG_HPP_
