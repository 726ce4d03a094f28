#ifndef RISKSCOUT_CLI_HPP_
#define RISKSCOUT_CLI_HPP_

#include <ostream>

namespace riskscout {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitInfeasible = 4;
inline constexpr int kExitCapExceeded = 5;

// Entry point of the `riskscout` tool: subcommands ingest, plan, simulate
// and compare. Returns the process exit code.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace riskscout

#endif  // RISKSCOUT_CLI_HPP_
