#pragma once

#include <iosfwd>

#include "mgchain/run_config.hpp"

namespace mgchain {

// Exit codes of the CLI: 0 success, 1 config error, 2 capacity error,
// 3 solver failure.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitCapacity = 2,
    kExitSolver = 3,
};

int cmd_ground(const RunConfig& cfg);
int cmd_entmap(const RunConfig& cfg);
int cmd_quench_small(const RunConfig& cfg);
int cmd_quench_large(const RunConfig& cfg);
int cmd_j2sweep(const RunConfig& cfg);
int cmd_approx(const RunConfig& cfg);
int cmd_gap(const RunConfig& cfg);

// Invariant suite (Hermiticity, conservation laws, metric properties, MG
// eigenstate residuals, ...).  Prints one PASS/FAIL line per check to `os`
// and returns the number of failures.
int run_selftest(std::ostream& os, std::uint64_t seed);

// Dispatches a parsed config to its subcommand; maps exceptions to exit
// codes and prints diagnostics to stderr.
int run_command(const RunConfig& cfg);

// Full CLI entry point (parse + dispatch).
int cli_main(int argc, const char* const* argv);

} // namespace mgchain
