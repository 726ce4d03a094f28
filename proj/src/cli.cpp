#include "riskscout/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <optional>
#include <set>
#include <sstream>

#include "riskscout/config.hpp"
#include "riskscout/error.hpp"
#include "riskscout/io.hpp"

namespace riskscout {

namespace fs = std::filesystem;

namespace {

// Flags shared by every subcommand; set ones override the config file.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> planner;
  std::optional<int> budget;
  std::optional<std::uint64_t> beta;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<int> scenes;
  bool plot = false;
};

void addCommon(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "experiment configuration (JSON)");
  cmd->add_option("--seed", f.seed, "run seed");
  cmd->add_option("--planner", f.planner, "exact or orienteering")
      ->check(CLI::IsMember({"exact", "orienteering"}));
  cmd->add_option("--budget", f.budget, "mission length in cells");
  cmd->add_option("--beta", f.beta, "orienteering iteration cap");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads (0: RISKSCOUT_THREADS or all cores)");
  cmd->add_option("--scenes", f.scenes, "scenes per configuration");
  cmd->add_flag("--emit-plot-data", f.plot, "also write long-format CSV for plotting");
}

ExperimentConfig resolveConfig(const CommonFlags& f) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : loadConfig(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.planner) c.planner = plannerFromName(*f.planner);
  if (f.budget) c.budget = *f.budget;
  if (f.beta) c.beta = *f.beta;
  if (f.out) c.out = *f.out;
  if (f.threads) c.threads = *f.threads;
  if (f.scenes) c.scenes = c.simulate_scenes = *f.scenes;
  validateConfig(c);
  return c;
}

PlannerSettings settingsFor(const ExperimentConfig& c) {
  PlannerSettings s;
  s.kind = c.planner;
  s.beta = c.beta;
  s.exact = c.exact;
  return s;
}

void requireBudget(int budget) {
  if (budget < 1) {
    throw InfeasibleError("budget " + std::to_string(budget) + " cannot pay for a single cell");
  }
}

double msSince(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

struct IngestFlags {
  std::string raster;
  std::optional<int> window;
  std::optional<double> hi;
  std::optional<double> lo;
  std::optional<double> smoothing;
  std::optional<std::string> scope;
};

int cmdIngest(const CommonFlags& common, const IngestFlags& f, std::ostream& out) {
  ExperimentConfig c = resolveConfig(common);
  if (f.window) c.ingest.window = *f.window;
  if (f.hi) c.ingest.thresholds.hi = *f.hi;
  if (f.lo) c.ingest.thresholds.lo = *f.lo;
  if (f.smoothing) c.ingest.smoothing = *f.smoothing;
  if (f.scope) c.ingest.scope = *f.scope == "cross_range" ? WhitenScope::kCrossRange : WhitenScope::kDownRange;
  validateConfig(c);

  Grid<double> raster;
  try {
    raster = parseCsvMatrix(readFile(f.raster));
  } catch (const ParseError& e) {
    throw ParseError(f.raster + ": " + e.what());
  }
  const PerformanceMap pm =
      buildPerformanceMap(raster, c.ingest.window, c.ingest.thresholds, c.ingest.smoothing, c.ingest.scope);

  const fs::path dir = c.out;
  Grid<double> labels(pm.classes.rows(), pm.classes.cols());
  std::vector<int> counts(kEnvClassCount, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<double>(pm.classes[i]);
    ++counts[static_cast<std::size_t>(pm.classes[i])];
  }
  PriorGrid pg;
  pg.rows = pm.phi.rows();
  pg.cols = pm.phi.cols();
  for (std::size_t k = 0; k < kEnvClassCount; ++k) pg.classes.push_back(envClassName(static_cast<EnvClass>(k)));
  pg.priors = pm.priors;
  writeFileAtomic(dir / "phi.csv", csvMatrix(pm.phi));
  writeFileAtomic(dir / "classes.csv", csvMatrix(labels));
  writeFileAtomic(dir / "prior_grid.json", dumpJson(priorGridToJson(pg)));
  if (common.plot) {
    std::string csv = "row,col,phi,class\n";
    for (std::size_t r = 0; r < pm.phi.rows(); ++r) {
      for (std::size_t col = 0; col < pm.phi.cols(); ++col) {
        csv += std::to_string(r) + ',' + std::to_string(col) + ',' + formatDouble(pm.phi(r, col)) + ',' +
               envClassName(pm.classes(r, col)) + '\n';
      }
    }
    writeFileAtomic(dir / "plot_envmap.csv", csv);
  }
  out << "ingested " << raster.rows() << " x " << raster.cols() << " raster into " << pg.rows << " x "
      << pg.cols << " cells:";
  for (std::size_t k = 0; k < kEnvClassCount; ++k) {
    out << ' ' << envClassName(static_cast<EnvClass>(k)) << '=' << counts[k];
  }
  out << "\nwrote " << (dir / "prior_grid.json").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmdPlan(const CommonFlags& common, std::ostream& out, std::ostream& err) {
  const ExperimentConfig c = resolveConfig(common);
  requireBudget(c.budget);
  const Scenario scenario = buildScenario(c);
  const MissionSetup setup = prepareMission(scenario);
  const VehicleState start{scenario.start, Heading::kIdle};

  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "plan_result";
  doc["planner"] = plannerName(c.planner);
  doc["budget"] = c.budget;
  doc["start"] = field::cellToJson(scenario.start);

  Plan plan;
  std::uint64_t expansions = 0;
  bool capped = false;
  const auto t0 = std::chrono::steady_clock::now();
  if (c.planner == PlannerKind::kExact) {
    ExactResult r = planExact(setup.grid, c.budget, start, c.exact);
    plan = std::move(r.plan);
    expansions = r.expansions;
    doc["tour"] = nullptr;
  } else {
    const RowGraph g = buildRowGraph(setup.grid, start);
    const OrienteeringResult r = planOrienteering(g, c.budget, c.beta);
    plan = tourToPlan(r.tour, g, setup.grid, start);
    expansions = r.expansions;
    capped = r.capped;
    doc["tour"] = tourToJson(r.tour);
    if (r.tour.vertices.empty()) {
      err << "warning: budget " << c.budget << " is below the cost of sweeping one row ("
          << g.start_cost << "); the tour is empty\n";
    }
    if (capped) err << "warning: iteration cap " << c.beta << " reached; the tour may not be optimal\n";
  }
  const double ms = msSince(t0);
  std::set<int> rows;
  for (const Leg& leg : plan.legs) rows.insert(leg.row);

  doc["plan"] = planToJson(plan);
  doc["expected_reward"] = plan.expected_reward;
  doc["budget_used"] = plan.budget_used;
  doc["rows_searched"] = rows.size();
  doc["expansions"] = expansions;
  doc["capped"] = capped;
  doc["planning_ms"] = ms;
  const fs::path dir = c.out;
  writeFileAtomic(dir / "plan.json", dumpJson(doc));
  if (common.plot) {
    std::string csv = "order,row,col,benefit\n";
    for (std::size_t k = 0; k < plan.searched_cells.size(); ++k) {
      const Cell cell = plan.searched_cells[k];
      csv += std::to_string(k) + ',' + std::to_string(cell.row) + ',' + std::to_string(cell.col) + ',' +
             formatDouble(setup.grid.benefit(static_cast<std::size_t>(cell.row), static_cast<std::size_t>(cell.col))) +
             '\n';
    }
    writeFileAtomic(dir / "plot_plan.csv", csv);
  }
  out << plannerName(c.planner) << " plan: " << plan.searched_cells.size() << " cells in " << rows.size()
      << " rows, budget " << plan.budget_used << " of " << c.budget << ", expected reward "
      << plan.expected_reward << ", " << expansions << " expansions, " << ms << " ms\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmdSimulate(const CommonFlags& common, std::ostream& out) {
  const ExperimentConfig c = resolveConfig(common);
  requireBudget(c.budget);
  const Scenario scenario = buildScenario(c);
  const MissionSetup setup = prepareMission(scenario);
  const PlannerSettings settings = settingsFor(c);

  std::vector<MissionRecord> records(static_cast<std::size_t>(c.simulate_scenes));
  PlanCache cache;
  const int threads = c.threads > 0 ? c.threads : defaultThreadCount();
  parallelFor(records.size(), threads, [&](std::size_t k) {
    const Scene scene = sampleScene(scenario, sceneSeed(c.seed, k));
    records[k] = runReplanLoop(settings, scenario, setup, scene, c.budget, c.reuse_plans ? &cache : nullptr);
  });

  const fs::path dir = c.out;
  writeFileAtomic(dir / "mission_record.json", dumpJson(missionToJson(records.front(), c.include_timing)));
  if (records.size() > 1) {
    std::string lines;
    for (const MissionRecord& r : records) lines += missionToJson(r, c.include_timing).dump() + '\n';
    writeFileAtomic(dir / "missions.jsonl", lines);
  }
  if (common.plot) {
    std::string csv = "scene,replan,order,row,col,z,y,benefit\n";
    for (std::size_t k = 0; k < records.size(); ++k) {
      int order = 0;
      for (std::size_t p = 0; p < records[k].replans.size(); ++p) {
        for (const CellObservation& o : records[k].replans[p].observations) {
          csv += std::to_string(k) + ',' + std::to_string(p) + ',' + std::to_string(order++) + ',' +
                 std::to_string(o.cell.row) + ',' + std::to_string(o.cell.col) + ',' +
                 std::to_string(o.measurement.z) + ',' + std::to_string(o.measurement.y) + ',' +
                 formatDouble(setup.grid.benefit(static_cast<std::size_t>(o.cell.row),
                                                 static_cast<std::size_t>(o.cell.col))) +
                 '\n';
        }
      }
    }
    writeFileAtomic(dir / "plot_path.csv", csv);
  }
  const MissionRecord& first = records.front();
  out << plannerName(c.planner) << " mission, H=" << c.budget << ": " << first.replans.size()
      << " legs, budget spent " << first.budget_spent << ", normalized performance " << first.performance
      << ", realized " << first.realized_performance << '\n';
  if (records.size() > 1) {
    out << records.size() << " missions, mean normalized performance " << normalizedPerformance(records) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmdCompare(const CommonFlags& common, std::ostream& out) {
  const ExperimentConfig c = resolveConfig(common);
  MonteCarloConfig mc;
  mc.scenario = buildScenario(c);
  mc.mission_lengths = c.mission_lengths;
  mc.beta = c.beta;
  mc.exact = c.exact;
  mc.scenes = c.scenes;
  mc.seed = c.seed;
  mc.threads = c.threads;
  mc.reuse_plans = c.reuse_plans;
  if (common.planner) mc.planners = {c.planner};
  const MonteCarloResult r = monteCarloCompare(mc);

  const fs::path dir = c.out;
  writeFileAtomic(dir / "summary.csv", summaryCsv(r.summary));
  std::string lines;
  for (const MissionRecord& t : r.trials) lines += missionToJson(t, true).dump() + '\n';
  writeFileAtomic(dir / "trials.jsonl", lines);
  if (common.plot) {
    std::string csv = "mission_length,planner,metric,mean,sd\n";
    for (const SummaryRow& row : r.summary) {
      const std::string key = std::to_string(row.mission_length) + ',' + plannerName(row.planner) + ',';
      csv += key + "performance," + formatDouble(row.mean_perf) + ',' + formatDouble(row.sd_perf) + '\n';
      csv += key + "time_ms," + formatDouble(row.mean_time_ms) + ',' + formatDouble(row.sd_time_ms) + '\n';
      csv += key + "realized_performance," + formatDouble(row.mean_realized) + ",\n";
    }
    writeFileAtomic(dir / "plot_performance.csv", csv);
  }
  out << "mission_length planner mean_perf sd_perf mean_time_ms\n";
  for (const SummaryRow& row : r.summary) {
    out << row.mission_length << ' ' << plannerName(row.planner) << ' ' << row.mean_perf << ' '
        << row.sd_perf << ' ' << row.mean_time_ms << '\n';
  }
  out << "wrote " << (dir / "summary.csv").string() << " and " << (dir / "trials.jsonl").string() << '\n';
  return kExitOk;
}

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk-driven search planning for survey vehicles", "riskscout"};
  app.require_subcommand(1);
  CommonFlags common;
  IngestFlags ingest_flags;

  CLI::App* ingest = app.add_subcommand("ingest", "raster CSV -> performance map and prior grid");
  addCommon(ingest, common);
  ingest->add_option("raster", ingest_flags.raster, "return-magnitude raster (CSV)")->required();
  ingest->add_option("--window", ingest_flags.window, "median window (odd)");
  ingest->add_option("--hi", ingest_flags.hi, "difficult threshold");
  ingest->add_option("--lo", ingest_flags.lo, "moderate threshold");
  ingest->add_option("--smoothing", ingest_flags.smoothing, "prior mass spread off the labeled class");
  ingest->add_option("--scope", ingest_flags.scope, "whitening scope")
      ->check(CLI::IsMember({"down_range", "cross_range"}));
  CLI::App* plan = app.add_subcommand("plan", "run one planner on the prior beliefs");
  addCommon(plan, common);
  CLI::App* simulate = app.add_subcommand("simulate", "fly replanning missions on sampled scenes");
  addCommon(simulate, common);
  CLI::App* compare = app.add_subcommand("compare", "Monte Carlo comparison of both planners");
  addCommon(compare, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (*ingest) return cmdIngest(common, ingest_flags, out);
    if (*plan) return cmdPlan(common, out, err);
    if (*simulate) return cmdSimulate(common, out);
    if (*compare) return cmdCompare(common, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const DegenerateDataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const ImpossibleObservationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const CapExceededError& e) {
    err << "error: " << e.what() << '\n';
    return kExitCapExceeded;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace riskscout
