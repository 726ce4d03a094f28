#include "riskscout/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "riskscout/error.hpp"

namespace riskscout {

namespace fs = std::filesystem;
using namespace field;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> splitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::vector<std::string> splitFields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t from = 0;
  for (;;) {
    const auto comma = line.find(',', from);
    out.push_back(trim(std::string_view(line).substr(from, comma - from)));
    if (comma == std::string::npos) break;
    from = comma + 1;
  }
  return out;
}

void checkHeader(const Json& j, const std::string& kind, const std::string& where) {
  if (!j.is_object()) fieldError(where, "expected an object");
  const int version = getInt(j, "schema_version", where);
  if (version != kSchemaVersion) {
    fieldError(where + ".schema_version",
               "unsupported version " + std::to_string(version) + ", expected " +
                   std::to_string(kSchemaVersion));
  }
  const std::string k = getString(j, "kind", where);
  if (k != kind) fieldError(where + ".kind", "expected \"" + kind + "\", found \"" + k + "\"");
}

Json header(const std::string& kind) {
  Json j = Json::object();
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

Leg legAt(const Json& j, const std::string& where) {
  rejectUnknownKeys(j, {"row", "col_start", "col_end", "direction"}, where);
  Leg leg;
  leg.row = getInt(j, "row", where);
  leg.col_start = getInt(j, "col_start", where);
  leg.col_end = getInt(j, "col_end", where);
  const std::string d = getString(j, "direction", where);
  if (d == "left") {
    leg.direction = Direction::kLeft;
  } else if (d == "right") {
    leg.direction = Direction::kRight;
  } else {
    fieldError(where + ".direction", "expected \"left\" or \"right\"");
  }
  return leg;
}

Plan planAt(const Json& j, const std::string& where) {
  checkHeader(j, "plan", where);
  rejectUnknownKeys(j, {"schema_version", "kind", "legs", "searched_cells", "budget_used", "expected_reward"},
                    where);
  Plan plan;
  const Json& legs = getArray(j, "legs", where);
  for (std::size_t i = 0; i < legs.size(); ++i) {
    plan.legs.push_back(legAt(legs[i], where + ".legs[" + std::to_string(i) + "]"));
  }
  const Json& cells = getArray(j, "searched_cells", where);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    plan.searched_cells.push_back(cellFromJson(cells[i], where + ".searched_cells[" + std::to_string(i) + "]"));
  }
  plan.budget_used = getInt(j, "budget_used", where);
  plan.expected_reward = getDouble(j, "expected_reward", where);
  return plan;
}

}  // namespace

namespace field {

void fieldError(const std::string& where, const std::string& what) {
  throw ParseError("field '" + where + "': " + what);
}

const Json& member(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fieldError(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fieldError(where + "." + key, "missing");
  return *it;
}

std::int64_t asInt(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) fieldError(where, "expected an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    fieldError(where, "integer out of range");
  }
  return v.get<std::int64_t>();
}

int getInt(const Json& j, const std::string& key, const std::string& where) {
  const std::int64_t v = asInt(member(j, key, where), where + "." + key);
  if (v < INT32_MIN || v > INT32_MAX) fieldError(where + "." + key, "integer out of range");
  return static_cast<int>(v);
}

std::uint64_t getU64(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = member(j, key, where);
  if (!v.is_number_unsigned()) fieldError(where + "." + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

double asDouble(const Json& v, const std::string& where) {
  if (!v.is_number()) fieldError(where, "expected a number");
  return v.get<double>();
}

double getDouble(const Json& j, const std::string& key, const std::string& where) {
  return asDouble(member(j, key, where), where + "." + key);
}

bool getBool(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = member(j, key, where);
  if (!v.is_boolean()) fieldError(where + "." + key, "expected true or false");
  return v.get<bool>();
}

std::string getString(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = member(j, key, where);
  if (!v.is_string()) fieldError(where + "." + key, "expected a string");
  return v.get<std::string>();
}

const Json& getArray(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = member(j, key, where);
  if (!v.is_array()) fieldError(where + "." + key, "expected an array");
  return v;
}

std::vector<double> getDoubles(const Json& j, const std::string& key, const std::string& where) {
  const Json& a = getArray(j, key, where);
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.push_back(asDouble(a[i], where + "." + key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json cellToJson(Cell c) { return Json::array({c.row, c.col}); }

Cell cellFromJson(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) fieldError(where, "expected [row, col]");
  const std::int64_t r = asInt(v[0], where + "[0]"), c = asInt(v[1], where + "[1]");
  if (r < 0 || c < 0 || r > INT32_MAX || c > INT32_MAX) fieldError(where, "negative or huge cell index");
  return {static_cast<int>(r), static_cast<int>(c)};
}

}  // namespace field

// ---------------------------------------------------------------------------

void writeFileAtomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  const fs::path tmp = path.string() + ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string readFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string formatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Grid<double> parseCsvMatrix(const std::string& text) {
  const auto lines = splitLines(text);
  if (lines.empty()) throw ParseError("CSV is empty");
  std::vector<double> values;
  std::size_t cols = 0;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto fields = splitFields(lines[r]);
    if (r == 0) cols = fields.size();
    if (fields.size() != cols) {
      throw ParseError("row " + std::to_string(r + 1) + ": expected " + std::to_string(cols) +
                       " columns, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ParseError("row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1) +
                         ": '" + f + "' is not a number");
      }
      values.push_back(v);
    }
  }
  Grid<double> out(lines.size(), cols);
  out.data() = std::move(values);
  return out;
}

std::string csvMatrix(const Grid<double>& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += formatDouble(m(r, c));
    }
    out += '\n';
  }
  return out;
}

CsvTable parseCsvTable(const std::string& text) {
  const auto lines = splitLines(text);
  if (lines.empty()) throw ParseError("CSV is empty");
  CsvTable t;
  t.header = splitFields(lines[0]);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto fields = splitFields(lines[r]);
    if (fields.size() != t.header.size()) {
      throw ParseError("row " + std::to_string(r + 1) + ": expected " +
                       std::to_string(t.header.size()) + " columns, found " +
                       std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

std::string summaryCsv(const std::vector<SummaryRow>& rows) {
  std::string out;
  for (std::size_t i = 0; i < kSummaryColumns.size(); ++i) {
    if (i) out += ',';
    out += kSummaryColumns[i];
  }
  out += '\n';
  for (const SummaryRow& r : rows) {
    out += std::to_string(r.mission_length) + ',' + plannerName(r.planner) + ',' +
           formatDouble(r.mean_perf) + ',' + formatDouble(r.sd_perf) + ',' +
           formatDouble(r.mean_time_ms) + ',' + formatDouble(r.sd_time_ms) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

void rejectUnknownKeys(const Json& j, const std::vector<std::string>& allowed,
                       const std::string& where) {
  if (!j.is_object()) fieldError(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fieldError(where + "." + key, "unknown key");
    }
  }
}

std::string dumpJson(const Json& j) { return j.dump(2) + "\n"; }

PlannerKind plannerFromName(const std::string& name) {
  if (name == "exact") return PlannerKind::kExact;
  if (name == "orienteering") return PlannerKind::kOrienteering;
  throw ParseError("unknown planner '" + name + "' (expected exact or orienteering)");
}

Json legToJson(const Leg& leg) {
  return {{"row", leg.row},
          {"col_start", leg.col_start},
          {"col_end", leg.col_end},
          {"direction", leg.direction == Direction::kLeft ? "left" : "right"}};
}

Leg legFromJson(const Json& j) { return legAt(j, "leg"); }

Json planToJson(const Plan& plan) {
  Json j = header("plan");
  j["legs"] = Json::array();
  for (const Leg& leg : plan.legs) j["legs"].push_back(legToJson(leg));
  j["searched_cells"] = Json::array();
  for (Cell c : plan.searched_cells) j["searched_cells"].push_back(cellToJson(c));
  j["budget_used"] = plan.budget_used;
  j["expected_reward"] = plan.expected_reward;
  return j;
}

Plan planFromJson(const Json& j) { return planAt(j, "plan"); }

Json tourToJson(const Tour& tour) {
  Json j = header("tour");
  j["vertices"] = tour.vertices;
  j["total_cost"] = tour.total_cost;
  j["total_reward"] = tour.total_reward;
  return j;
}

Tour tourFromJson(const Json& j) {
  const std::string where = "tour";
  checkHeader(j, "tour", where);
  rejectUnknownKeys(j, {"schema_version", "kind", "vertices", "total_cost", "total_reward"}, where);
  Tour t;
  const Json& v = getArray(j, "vertices", where);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::int64_t row = asInt(v[i], where + ".vertices[" + std::to_string(i) + "]");
    if (row < 0 || row > INT32_MAX) fieldError(where + ".vertices[" + std::to_string(i) + "]", "bad row");
    t.vertices.push_back(static_cast<int>(row));
  }
  t.total_cost = getInt(j, "total_cost", where);
  t.total_reward = getDouble(j, "total_reward", where);
  return t;
}

Json priorGridToJson(const PriorGrid& grid) {
  Json j = header("prior_grid");
  j["rows"] = grid.rows;
  j["cols"] = grid.cols;
  j["classes"] = grid.classes;
  j["priors"] = Json::array();
  for (const auto& p : grid.priors) {
    j["priors"].push_back(std::vector<double>(p.probs().begin(), p.probs().end()));
  }
  return j;
}

PriorGrid priorGridFromJson(const Json& j) {
  const std::string where = "prior_grid";
  checkHeader(j, "prior_grid", where);
  rejectUnknownKeys(j, {"schema_version", "kind", "rows", "cols", "classes", "priors"}, where);
  PriorGrid g;
  const int rows = getInt(j, "rows", where), cols = getInt(j, "cols", where);
  if (rows < 1) fieldError(where + ".rows", "must be at least 1");
  if (cols < 1) fieldError(where + ".cols", "must be at least 1");
  g.rows = static_cast<std::size_t>(rows);
  g.cols = static_cast<std::size_t>(cols);
  const Json& classes = getArray(j, "classes", where);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!classes[i].is_string()) fieldError(where + ".classes[" + std::to_string(i) + "]", "expected a string");
    g.classes.push_back(classes[i].get<std::string>());
  }
  if (g.classes.empty()) fieldError(where + ".classes", "must name at least one class");
  const Json& priors = getArray(j, "priors", where);
  if (priors.size() != g.rows * g.cols) {
    fieldError(where + ".priors", "expected rows * cols = " + std::to_string(g.rows * g.cols) +
                                      " entries, found " + std::to_string(priors.size()));
  }
  for (std::size_t i = 0; i < priors.size(); ++i) {
    const std::string at = where + ".priors[" + std::to_string(i) + "]";
    if (!priors[i].is_array() || priors[i].size() != g.classes.size()) {
      fieldError(at, "expected " + std::to_string(g.classes.size()) + " probabilities");
    }
    std::vector<double> p;
    for (std::size_t k = 0; k < priors[i].size(); ++k) p.push_back(asDouble(priors[i][k], at));
    try {
      g.priors.emplace_back(std::move(p));
    } catch (const std::invalid_argument& e) {
      fieldError(at, e.what());
    }
  }
  return g;
}

Json missionToJson(const MissionRecord& record, bool include_timing) {
  Json j = header("mission_record");
  j["planner"] = plannerName(record.planner);
  j["mission_length"] = record.mission_length;
  j["scene_seed"] = record.scene_seed;
  j["budget_spent"] = record.budget_spent;
  j["planned_reward"] = record.planned_reward;
  j["realized_reduction"] = record.realized_reduction;
  j["total_prior_risk"] = record.total_prior_risk;
  j["performance"] = record.performance;
  j["realized_performance"] = record.realized_performance;
  j["replans"] = Json::array();
  for (const ReplanRecord& step : record.replans) {
    Json s;
    s["plan"] = planToJson(step.plan);
    s["executed"] = legToJson(step.executed);
    s["leg_cost"] = step.leg_cost;
    s["budget_remaining"] = step.budget_remaining;
    s["expansions"] = step.expansions;
    s["capped"] = step.capped;
    if (include_timing) {
      s["planning_ms"] = step.planning_ms;
      s["reused"] = step.reused;
    }
    s["observations"] = Json::array();
    for (const CellObservation& o : step.observations) {
      s["observations"].push_back({{"cell", cellToJson(o.cell)},
                                   {"z", o.measurement.z},
                                   {"y", o.measurement.y},
                                   {"targets", o.targets},
                                   {"env", o.env}});
    }
    j["replans"].push_back(std::move(s));
  }
  return j;
}

MissionRecord missionFromJson(const Json& j) {
  const std::string where = "mission_record";
  checkHeader(j, "mission_record", where);
  rejectUnknownKeys(j, {"schema_version", "kind", "planner", "mission_length", "scene_seed",
                        "budget_spent", "planned_reward", "realized_reduction", "total_prior_risk",
                        "performance", "realized_performance", "replans"},
                    where);
  MissionRecord r;
  try {
    r.planner = plannerFromName(getString(j, "planner", where));
  } catch (const ParseError& e) {
    fieldError(where + ".planner", e.what());
  }
  r.mission_length = getInt(j, "mission_length", where);
  r.scene_seed = getU64(j, "scene_seed", where);
  r.budget_spent = getInt(j, "budget_spent", where);
  r.planned_reward = getDouble(j, "planned_reward", where);
  r.realized_reduction = getDouble(j, "realized_reduction", where);
  r.total_prior_risk = getDouble(j, "total_prior_risk", where);
  r.performance = getDouble(j, "performance", where);
  r.realized_performance = getDouble(j, "realized_performance", where);
  const Json& replans = getArray(j, "replans", where);
  for (std::size_t k = 0; k < replans.size(); ++k) {
    const std::string at = where + ".replans[" + std::to_string(k) + "]";
    const Json& s = replans[k];
    rejectUnknownKeys(s, {"plan", "executed", "leg_cost", "budget_remaining", "expansions", "capped",
                          "planning_ms", "reused", "observations"},
                      at);
    ReplanRecord step;
    step.plan = planAt(member(s, "plan", at), at + ".plan");
    step.executed = legAt(member(s, "executed", at), at + ".executed");
    step.leg_cost = getInt(s, "leg_cost", at);
    step.budget_remaining = getInt(s, "budget_remaining", at);
    step.expansions = getU64(s, "expansions", at);
    step.capped = getBool(s, "capped", at);
    if (s.contains("planning_ms")) step.planning_ms = getDouble(s, "planning_ms", at);
    if (s.contains("reused")) step.reused = getBool(s, "reused", at);
    const Json& obs = getArray(s, "observations", at);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string oat = at + ".observations[" + std::to_string(i) + "]";
      rejectUnknownKeys(obs[i], {"cell", "z", "y", "targets", "env"}, oat);
      CellObservation o;
      o.cell = cellFromJson(member(obs[i], "cell", oat), oat + ".cell");
      o.measurement.z = getInt(obs[i], "z", oat);
      const int y = getInt(obs[i], "y", oat);
      if (o.measurement.z < 0) fieldError(oat + ".z", "must be nonnegative");
      if (y < 0) fieldError(oat + ".y", "must be nonnegative");
      o.measurement.y = static_cast<EnvIndex>(y);
      o.targets = getDoubles(obs[i], "targets", oat);
      o.env = getDoubles(obs[i], "env", oat);
      step.observations.push_back(std::move(o));
    }
    r.replans.push_back(std::move(step));
  }
  return r;
}

}  // namespace riskscout
