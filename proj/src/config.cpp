#include "riskscout/config.hpp"

#include <cmath>

#include "riskscout/error.hpp"

namespace riskscout {

namespace fs = std::filesystem;
using namespace field;

namespace {

const char* sourceName(GridSourceKind k) {
  switch (k) {
    case GridSourceKind::kStandard: return "standard";
    case GridSourceKind::kRegions: return "regions";
    case GridSourceKind::kPriorFile: return "prior_file";
    case GridSourceKind::kHarbor: return "harbor";
  }
  return "standard";
}

// Runs `f`, turning argument errors from library constructors into a
// ParseError on `where`.
template <typename F>
auto guarded(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    fieldError(where, e.what());
  }
}

int positiveInt(const Json& j, const std::string& key, const std::string& where, int min) {
  const int v = getInt(j, key, where);
  if (v < min) fieldError(where + "." + key, "must be at least " + std::to_string(min));
  return v;
}

Region regionFromJson(const Json& j, const std::string& where) {
  rejectUnknownKeys(j, {"name", "row0", "col0", "rows", "cols", "env"}, where);
  Region r;
  r.name = j.contains("name") ? getString(j, "name", where) : where;
  r.row0 = getInt(j, "row0", where);
  r.col0 = getInt(j, "col0", where);
  r.rows = positiveInt(j, "rows", where, 1);
  r.cols = positiveInt(j, "cols", where, 1);
  r.env = getDoubles(j, "env", where);
  guarded(where + ".env", [&] { return EnvDistribution(r.env); });
  return r;
}

Json regionToJson(const Region& r) {
  return {{"name", r.name}, {"row0", r.row0}, {"col0", r.col0},
          {"rows", r.rows}, {"cols", r.cols}, {"env", r.env}};
}

GridSource gridFromJson(const Json& j, const fs::path& base_dir) {
  const std::string where = "grid";
  GridSource g;
  const std::string source = j.contains("source") ? getString(j, "source", where) : "standard";
  if (source == "standard") {
    rejectUnknownKeys(j, {"source"}, where);
  } else if (source == "regions") {
    g.kind = GridSourceKind::kRegions;
    rejectUnknownKeys(j, {"source", "rows", "cols", "regions"}, where);
    g.rows = positiveInt(j, "rows", where, 1);
    g.cols = positiveInt(j, "cols", where, 1);
    const Json& regions = getArray(j, "regions", where);
    for (std::size_t i = 0; i < regions.size(); ++i) {
      g.regions.push_back(regionFromJson(regions[i], where + ".regions[" + std::to_string(i) + "]"));
    }
    guarded(where + ".regions", [&] { return regionScenario(g.rows, g.cols, g.regions); });
  } else if (source == "prior_file") {
    g.kind = GridSourceKind::kPriorFile;
    rejectUnknownKeys(j, {"source", "path"}, where);
    fs::path p = getString(j, "path", where);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    g.path = p.string();
  } else if (source == "harbor") {
    g.kind = GridSourceKind::kHarbor;
    rejectUnknownKeys(j, {"source", "seed", "smoothing"}, where);
    if (j.contains("seed")) g.harbor_seed = getU64(j, "seed", where);
    if (j.contains("smoothing")) g.harbor_smoothing = getDouble(j, "smoothing", where);
    if (!(g.harbor_smoothing >= 0.0 && g.harbor_smoothing < 1.0)) {
      fieldError(where + ".smoothing", "must lie in [0, 1)");
    }
  } else {
    fieldError(where + ".source", "expected standard, regions, prior_file or harbor");
  }
  return g;
}

SensorSuite sensorFromJson(const Json& j) {
  const std::string where = "sensor";
  rejectUnknownKeys(j, {"detection", "false_alarm", "confusion", "labels"}, where);
  const auto detection = getDoubles(j, "detection", where);
  const auto false_alarm = getDoubles(j, "false_alarm", where);
  std::vector<std::vector<double>> confusion;
  const Json& rows = getArray(j, "confusion", where);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array()) fieldError(where + ".confusion[" + std::to_string(i) + "]", "expected an array");
    std::vector<double> row;
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      row.push_back(asDouble(rows[i][k], where + ".confusion[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
    }
    confusion.push_back(std::move(row));
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    const Json& l = getArray(j, "labels", where);
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (!l[i].is_string()) fieldError(where + ".labels[" + std::to_string(i) + "]", "expected a string");
      labels.push_back(l[i].get<std::string>());
    }
  }
  return guarded(where, [&] { return SensorSuite(detection, false_alarm, confusion, labels); });
}

LossModel lossFromJson(const Json& j) {
  const std::string where = "loss";
  rejectUnknownKeys(j, {"under", "over", "env_under", "env_over", "ordering"}, where);
  LossModel l;
  if (j.contains("under")) l.under = getDouble(j, "under", where);
  if (j.contains("over")) l.over = getDouble(j, "over", where);
  if (j.contains("env_under")) l.env_under = getDouble(j, "env_under", where);
  if (j.contains("env_over")) l.env_over = getDouble(j, "env_over", where);
  if (j.contains("ordering")) {
    const std::string o = getString(j, "ordering", where);
    if (o == "index") {
      l.ordering = EnvOrdering::kByIndex;
    } else if (o == "risk") {
      l.ordering = EnvOrdering::kByRisk;
    } else {
      fieldError(where + ".ordering", "expected index or risk");
    }
  }
  guarded(where, [&] {
    l.validate();
    return 0;
  });
  return l;
}

ExactOptions exactFromJson(const Json& j) {
  const std::string where = "exact";
  rejectUnknownKeys(j, {"bound", "merge_duplicates", "node_cap"}, where);
  ExactOptions e;
  if (j.contains("bound")) {
    const std::string b = getString(j, "bound", where);
    if (b == "relaxed") {
      e.bound = ExactBound::kRelaxed;
    } else if (b == "max_cell") {
      e.bound = ExactBound::kMaxCell;
    } else {
      fieldError(where + ".bound", "expected relaxed or max_cell");
    }
  }
  if (j.contains("merge_duplicates")) e.merge_duplicates = getBool(j, "merge_duplicates", where);
  if (j.contains("node_cap")) {
    e.node_cap = getU64(j, "node_cap", where);
    if (e.node_cap < 1) fieldError(where + ".node_cap", "must be at least 1");
  }
  return e;
}

IngestSettings ingestFromJson(const Json& j) {
  const std::string where = "ingest";
  rejectUnknownKeys(j, {"window", "hi", "lo", "smoothing", "scope"}, where);
  IngestSettings s;
  if (j.contains("window")) s.window = getInt(j, "window", where);
  if (j.contains("hi")) s.thresholds.hi = getDouble(j, "hi", where);
  if (j.contains("lo")) s.thresholds.lo = getDouble(j, "lo", where);
  if (j.contains("smoothing")) s.smoothing = getDouble(j, "smoothing", where);
  if (j.contains("scope")) {
    const std::string sc = getString(j, "scope", where);
    if (sc == "down_range") {
      s.scope = WhitenScope::kDownRange;
    } else if (sc == "cross_range") {
      s.scope = WhitenScope::kCrossRange;
    } else {
      fieldError(where + ".scope", "expected down_range or cross_range");
    }
  }
  return s;
}

}  // namespace

void validateConfig(const ExperimentConfig& c) {
  if (c.x_max < 0) fieldError("x_max", "must be nonnegative");
  if (!c.target_prior.empty()) {
    if (c.target_prior.size() != static_cast<std::size_t>(c.x_max) + 1) {
      fieldError("target_prior", "expected x_max + 1 = " + std::to_string(c.x_max + 1) + " probabilities");
    }
    guarded("target_prior", [&] { return CountDistribution(c.target_prior); });
  }
  if (c.mission_lengths.empty()) fieldError("mission_lengths", "must list at least one length");
  for (std::size_t i = 0; i < c.mission_lengths.size(); ++i) {
    if (c.mission_lengths[i] < 1) fieldError("mission_lengths[" + std::to_string(i) + "]", "must be at least 1");
  }
  if (c.beta < 1) fieldError("beta", "must be at least 1");
  if (c.exact.node_cap < 1) fieldError("exact.node_cap", "must be at least 1");
  if (c.scenes < 1) fieldError("scenes", "must be at least 1");
  if (c.simulate_scenes < 1) fieldError("simulate_scenes", "must be at least 1");
  if (c.threads < 0) fieldError("threads", "must be nonnegative");
  if (c.out.empty()) fieldError("out", "must name a directory");
  guarded("loss", [&] {
    c.loss.validate();
    return 0;
  });
  if (c.ingest.window < 1 || c.ingest.window % 2 == 0) fieldError("ingest.window", "must be a positive odd number");
  if (!(c.ingest.thresholds.hi > c.ingest.thresholds.lo)) fieldError("ingest.hi", "must exceed ingest.lo");
  if (!(c.ingest.smoothing >= 0.0 && c.ingest.smoothing < 1.0)) fieldError("ingest.smoothing", "must lie in [0, 1)");
  if (c.grid.kind == GridSourceKind::kRegions) {
    for (std::size_t i = 0; i < c.grid.regions.size(); ++i) {
      if (c.grid.regions[i].env.size() != c.sensor.classes()) {
        fieldError("grid.regions[" + std::to_string(i) + "].env",
                   "has " + std::to_string(c.grid.regions[i].env.size()) + " classes but the sensor has " +
                       std::to_string(c.sensor.classes()));
      }
    }
  }
  if ((c.grid.kind == GridSourceKind::kStandard || c.grid.kind == GridSourceKind::kHarbor) &&
      c.sensor.classes() != kEnvClassCount) {
    fieldError("sensor", "the " + std::string(sourceName(c.grid.kind)) + " grid needs " +
                             std::to_string(kEnvClassCount) + " sensor classes");
  }
  if (c.start && (c.start->row < 0 || c.start->col < 0)) fieldError("start", "must be nonnegative");
}

ExperimentConfig configFromJson(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  rejectUnknownKeys(j,
                    {"schema_version", "grid", "start", "sensor", "loss", "x_max", "target_prior",
                     "mission_lengths", "budget", "planner", "beta", "exact", "scenes",
                     "simulate_scenes", "seed", "threads", "reuse_plans", "include_timing", "out",
                     "ingest"},
                    "config");
  if (j.contains("schema_version") && getInt(j, "schema_version", "config") != kSchemaVersion) {
    fieldError("schema_version", "unsupported version");
  }
  ExperimentConfig c;
  if (j.contains("grid")) c.grid = gridFromJson(j["grid"], base_dir);
  if (j.contains("start")) c.start = cellFromJson(j["start"], "start");
  if (j.contains("sensor")) c.sensor = sensorFromJson(j["sensor"]);
  if (j.contains("loss")) c.loss = lossFromJson(j["loss"]);
  if (j.contains("x_max")) c.x_max = getInt(j, "x_max", "config");
  if (j.contains("target_prior")) c.target_prior = getDoubles(j, "target_prior", "config");
  if (j.contains("mission_lengths")) {
    const Json& a = getArray(j, "mission_lengths", "config");
    c.mission_lengths.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::int64_t v = asInt(a[i], "mission_lengths[" + std::to_string(i) + "]");
      if (v < 1 || v > INT32_MAX) fieldError("mission_lengths[" + std::to_string(i) + "]", "must be at least 1");
      c.mission_lengths.push_back(static_cast<int>(v));
    }
  }
  if (j.contains("budget")) c.budget = getInt(j, "budget", "config");
  if (j.contains("planner")) {
    const std::string name = getString(j, "planner", "config");
    if (name != "exact" && name != "orienteering") fieldError("planner", "expected exact or orienteering");
    c.planner = plannerFromName(name);
  }
  if (j.contains("beta")) c.beta = getU64(j, "beta", "config");
  if (j.contains("exact")) c.exact = exactFromJson(j["exact"]);
  if (j.contains("scenes")) c.scenes = getInt(j, "scenes", "config");
  if (j.contains("simulate_scenes")) c.simulate_scenes = getInt(j, "simulate_scenes", "config");
  if (j.contains("seed")) c.seed = getU64(j, "seed", "config");
  if (j.contains("threads")) c.threads = getInt(j, "threads", "config");
  if (j.contains("reuse_plans")) c.reuse_plans = getBool(j, "reuse_plans", "config");
  if (j.contains("include_timing")) c.include_timing = getBool(j, "include_timing", "config");
  if (j.contains("out")) c.out = getString(j, "out", "config");
  if (j.contains("ingest")) c.ingest = ingestFromJson(j["ingest"]);
  validateConfig(c);
  return c;
}

Json configToJson(const ExperimentConfig& c) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json grid{{"source", sourceName(c.grid.kind)}};
  switch (c.grid.kind) {
    case GridSourceKind::kStandard: break;
    case GridSourceKind::kRegions:
      grid["rows"] = c.grid.rows;
      grid["cols"] = c.grid.cols;
      grid["regions"] = Json::array();
      for (const Region& r : c.grid.regions) grid["regions"].push_back(regionToJson(r));
      break;
    case GridSourceKind::kPriorFile: grid["path"] = c.grid.path; break;
    case GridSourceKind::kHarbor:
      grid["seed"] = c.grid.harbor_seed;
      grid["smoothing"] = c.grid.harbor_smoothing;
      break;
  }
  j["grid"] = grid;
  if (c.start) j["start"] = cellToJson(*c.start);
  j["sensor"] = {{"detection", c.sensor.detections()},
                 {"false_alarm", c.sensor.falseAlarms()},
                 {"confusion", c.sensor.confusionMatrix()},
                 {"labels", c.sensor.labels()}};
  j["loss"] = {{"under", c.loss.under},
               {"over", c.loss.over},
               {"env_under", c.loss.env_under},
               {"env_over", c.loss.env_over},
               {"ordering", c.loss.ordering == EnvOrdering::kByIndex ? "index" : "risk"}};
  j["x_max"] = c.x_max;
  if (!c.target_prior.empty()) j["target_prior"] = c.target_prior;
  j["mission_lengths"] = c.mission_lengths;
  j["budget"] = c.budget;
  j["planner"] = plannerName(c.planner);
  j["beta"] = c.beta;
  j["exact"] = {{"bound", c.exact.bound == ExactBound::kRelaxed ? "relaxed" : "max_cell"},
                {"merge_duplicates", c.exact.merge_duplicates},
                {"node_cap", c.exact.node_cap}};
  j["scenes"] = c.scenes;
  j["simulate_scenes"] = c.simulate_scenes;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["reuse_plans"] = c.reuse_plans;
  j["include_timing"] = c.include_timing;
  j["out"] = c.out;
  j["ingest"] = {{"window", c.ingest.window},
                 {"hi", c.ingest.thresholds.hi},
                 {"lo", c.ingest.thresholds.lo},
                 {"smoothing", c.ingest.smoothing},
                 {"scope", c.ingest.scope == WhitenScope::kDownRange ? "down_range" : "cross_range"}};
  return j;
}

ExperimentConfig loadConfig(const fs::path& path) {
  const std::string text = readFile(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return configFromJson(j, path.parent_path());
}

Scenario buildScenario(const ExperimentConfig& c) {
  validateConfig(c);
  Scenario s;
  switch (c.grid.kind) {
    case GridSourceKind::kStandard: s = standardScenario(); break;
    case GridSourceKind::kRegions:
      s = guarded("grid.regions", [&] { return regionScenario(c.grid.rows, c.grid.cols, c.grid.regions); });
      break;
    case GridSourceKind::kPriorFile: {
      Json j;
      try {
        j = Json::parse(readFile(c.grid.path));
      } catch (const Json::parse_error& e) {
        throw ParseError(c.grid.path + ": " + e.what());
      }
      const PriorGrid pg = priorGridFromJson(j);
      if (pg.classes.size() != c.sensor.classes()) {
        fieldError("grid.path", "prior grid has " + std::to_string(pg.classes.size()) +
                                    " classes but the sensor has " + std::to_string(c.sensor.classes()));
      }
      s.rows = pg.rows;
      s.cols = pg.cols;
      s.env_priors = pg.priors;
      s.start = {static_cast<int>(s.rows) - 1, 0};
      break;
    }
    case GridSourceKind::kHarbor: s = harborScenario(c.grid.harbor_seed, c.grid.harbor_smoothing); break;
  }
  s.sensor = c.sensor;
  s.loss = c.loss;
  s.target_prior = c.target_prior.empty() ? CountDistribution::uniform(c.x_max)
                                          : CountDistribution(c.target_prior);
  if (c.start) {
    if (c.start->row >= static_cast<int>(s.rows) || c.start->col >= static_cast<int>(s.cols)) {
      fieldError("start", "lies outside the " + std::to_string(s.rows) + " x " + std::to_string(s.cols) + " grid");
    }
    s.start = *c.start;
  }
  return s;
}

}  // namespace riskscout
