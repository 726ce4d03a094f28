#ifndef RISKSCOUT_IO_HPP_
#define RISKSCOUT_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskscout/envmap.hpp"
#include "riskscout/plan.hpp"
#include "riskscout/planner_orienteering.hpp"
#include "riskscout/sim.hpp"

namespace riskscout {

// Version stamped into every JSON artifact. Readers reject other versions.
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::json;

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file. Creates missing parent directories.
void writeFileAtomic(const std::filesystem::path& path, const std::string& contents);
std::string readFile(const std::filesystem::path& path);

// --- CSV -------------------------------------------------------------------

// Numeric matrix, one row per line. Throws ParseError with the 1-based row
// and column of the first bad field or ragged row.
Grid<double> parseCsvMatrix(const std::string& text);
std::string csvMatrix(const Grid<double>& m);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Plain comma-separated table with a header line; fields hold no commas.
CsvTable parseCsvTable(const std::string& text);

std::string summaryCsv(const std::vector<SummaryRow>& rows);
inline const std::vector<std::string> kSummaryColumns{
    "mission_length", "planner", "mean_perf", "sd_perf", "mean_time_ms", "sd_time_ms"};

// Shortest decimal form that reads back to the same double.
std::string formatDouble(double v);

// --- JSON artifacts --------------------------------------------------------
// Every *FromJson throws ParseError naming the offending field.

Json legToJson(const Leg& leg);
Leg legFromJson(const Json& j);

Json planToJson(const Plan& plan);
Plan planFromJson(const Json& j);

Json tourToJson(const Tour& tour);
Tour tourFromJson(const Json& j);

struct PriorGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::string> classes;
  std::vector<EnvDistribution> priors;  // row-major
  bool operator==(const PriorGrid&) const = default;
};

Json priorGridToJson(const PriorGrid& grid);
PriorGrid priorGridFromJson(const Json& j);

// Timing (planning_ms) and cache reuse flags vary between runs, so they are
// left out unless asked for; the rest of a record is a pure function of the
// configuration and seed.
Json missionToJson(const MissionRecord& record, bool include_timing = false);
MissionRecord missionFromJson(const Json& j);

// Strict readers for JSON documents. `where` is the dotted path of the
// enclosing object; failures throw ParseError naming the full field path.
namespace field {
[[noreturn]] void fieldError(const std::string& where, const std::string& what);
const Json& member(const Json& j, const std::string& key, const std::string& where);
std::int64_t asInt(const Json& v, const std::string& where);
int getInt(const Json& j, const std::string& key, const std::string& where);
std::uint64_t getU64(const Json& j, const std::string& key, const std::string& where);
double asDouble(const Json& v, const std::string& where);
double getDouble(const Json& j, const std::string& key, const std::string& where);
bool getBool(const Json& j, const std::string& key, const std::string& where);
std::string getString(const Json& j, const std::string& key, const std::string& where);
const Json& getArray(const Json& j, const std::string& key, const std::string& where);
std::vector<double> getDoubles(const Json& j, const std::string& key, const std::string& where);
Json cellToJson(Cell c);
Cell cellFromJson(const Json& v, const std::string& where);
}  // namespace field

PlannerKind plannerFromName(const std::string& name);

// Pretty-printed document with a trailing newline.
std::string dumpJson(const Json& j);

// Keys of `j` that are not in `allowed`, reported as ParseError on `where`.
void rejectUnknownKeys(const Json& j, const std::vector<std::string>& allowed,
                       const std::string& where);

}  // namespace riskscout

#endif  // RISKSCOUT_IO_HPP_
