#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgchain/hamiltonian.hpp"

namespace mgchain {

// Inclusive numeric range lo..hi sampled every `step`; a single value is a
// degenerate range.  Parsed from "lo:hi:step" flags.
struct Range {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    bool single = true;

    std::vector<double> values() const;
    static Range from_value(double v);
    // Throws ConfigError for malformed text, lo > hi, or step <= 0.
    static Range parse(const std::string& text, const std::string& flag_name);
};

struct RunConfig {
    std::string subcommand;

    int n = 16;
    int nprime = 4;
    Range h = Range::from_value(0.0);
    Range j2 = Range::from_value(0.5);
    Boundary boundary = Boundary::open;
    std::vector<double> sectors_l = {0.0, -1.0, -2.0}; // polarizations, in hbar
    bool sectors_set = false; // --sectors given explicitly (j2sweep default differs)
    std::uint64_t seed = 1234567;
    std::size_t dense_threshold = 16384;
    int threads = 0; // 0 = hardware concurrency
    std::string out; // empty = "<subcommand>.csv"

    // quench flags
    double epsilon = 0.001;
    double h_initial = 1.6;
    double h_final = 1.3;
    double t_max = 1000.0;
    int samples = 10000;
    int bins = 50;

    // entmap test mode: map of the psi1 covering instead of a ground state
    bool psi1_mode = false;

    // approx scan grid
    double jadd_lo = -1.0;
    double jadd_hi = 1.0;
    int jadd_steps = 81;

    std::vector<int> sectors_twice_l() const; // validated against n
    std::string output_path() const;
    // Effective configuration echoed into output headers (includes the
    // adopted field sign convention).
    std::string echo_json() const;
};

// Parses argv (subcommand + flags, with optional --config key=value file;
// explicit flags win over file values).  Throws ConfigError on bad input.
// Returns false in `run` when a help/usage request was handled.
RunConfig parse_cli(int argc, const char* const* argv, bool& run, std::string& help_text);

} // namespace mgchain
