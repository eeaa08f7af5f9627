#include "mgchain/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"

#include "mgchain/errors.hpp"
#include "mgchain/sector.hpp"
#include "mgchain/version.hpp"

namespace mgchain {

namespace {

double parse_double(const std::string& text, const std::string& flag) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(flag + ": not a number: '" + text + "'");
    }
}

long long parse_integer(const std::string& text, const std::string& flag) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(flag + ": not an integer: '" + text + "'");
    }
}

bool parse_bool(const std::string& text, const std::string& flag) {
    if (text == "1" || text == "true") return true;
    if (text == "0" || text == "false") return false;
    throw ConfigError(flag + ": expected true/false, got '" + text + "'");
}

// Flat key=value lines, '#' comments; keys are the long flag names.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file: cannot open '" + path + "'");
    auto trim = [](const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::vector<std::pair<std::string, std::string>> items;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config file line " + std::to_string(lineno) +
                              ": expected key=value, got '" + t + "'");
        items.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return items;
}

std::string compact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void validate(RunConfig& cfg) {
    if (cfg.n < 2 || cfg.n > kMaxSites)
        throw ConfigError("--n must be in [2, " + std::to_string(kMaxSites) + "]");
    if (cfg.nprime < 0 || cfg.nprime > cfg.n)
        throw ConfigError("--nprime must be in [0, n]");
    if (cfg.dense_threshold < 1)
        throw ConfigError("--dense-threshold must be positive");
    if (cfg.threads < 0)
        throw ConfigError("--threads must be >= 0");
    if (cfg.samples < 2)
        throw ConfigError("--samples must be at least 2");
    if (cfg.bins < 1)
        throw ConfigError("--bins must be at least 1");
    if (!(cfg.t_max > 0.0))
        throw ConfigError("--tmax must be positive");
    if (cfg.epsilon < 0.0)
        throw ConfigError("--epsilon must be non-negative");
    if (cfg.jadd_steps < 2)
        throw ConfigError("--jadd-steps must be at least 2");
    if (!(cfg.jadd_lo < cfg.jadd_hi))
        throw ConfigError("--jadd-lo must be below --jadd-hi");

    if (!cfg.sectors_set) {
        // keep only sectors the chain actually has (odd chains get the
        // half-integer analog of the {0,-1,-2} default)
        std::vector<double> def =
            cfg.n % 2 == 0 ? std::vector<double>{0.0, -1.0, -2.0}
                           : std::vector<double>{-0.5, -1.5, -2.5};
        cfg.sectors_l.clear();
        for (double l : def)
            if (2.0 * std::abs(l) <= cfg.n) cfg.sectors_l.push_back(l);
    }
    cfg.sectors_twice_l();
}

} // namespace

std::vector<double> Range::values() const {
    if (single) return {lo};
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(lo + step * i);
    return out;
}

Range Range::from_value(double v) { return Range{v, v, 0.0, true}; }

Range Range::parse(const std::string& text, const std::string& flag_name) {
    std::vector<std::string> parts;
    std::istringstream in(text);
    for (std::string cur; std::getline(in, cur, ':');) parts.push_back(cur);
    if (parts.size() != 3)
        throw ConfigError(flag_name + ": expected lo:hi:step, got '" + text + "'");
    Range r;
    r.lo = parse_double(parts[0], flag_name);
    r.hi = parse_double(parts[1], flag_name);
    r.step = parse_double(parts[2], flag_name);
    r.single = false;
    if (r.lo > r.hi)
        throw ConfigError(flag_name + ": lo > hi in '" + text + "'");
    if (!(r.step > 0.0))
        throw ConfigError(flag_name + ": step must be positive in '" + text + "'");
    return r;
}

std::vector<int> RunConfig::sectors_twice_l() const {
    if (sectors_l.empty()) throw ConfigError("--sectors: empty sector list");
    std::vector<int> out;
    for (double l : sectors_l) {
        try {
            out.push_back(Sector::twice_l_from_double(n, l));
        } catch (const DomainError&) {
            throw ConfigError("--sectors: L=" + compact(l) + " is invalid for n=" +
                              std::to_string(n));
        }
    }
    return out;
}

std::string RunConfig::output_path() const {
    return out.empty() ? subcommand + ".csv" : out;
}

std::string RunConfig::echo_json() const {
    using ordered_json = nlohmann::ordered_json;
    auto range_json = [](const Range& r) {
        if (r.single) return ordered_json(r.lo);
        ordered_json o;
        o["lo"] = r.lo;
        o["hi"] = r.hi;
        o["step"] = r.step;
        return o;
    };

    ordered_json j;
    j["command"] = subcommand;
    j["n"] = n;
    j["nprime"] = nprime;
    j["j2"] = range_json(j2);
    j["h"] = range_json(h);
    j["boundary"] = boundary == Boundary::open ? "open" : "periodic";
    j["sectors_l"] = sectors_l;
    j["seed"] = seed;
    j["dense_threshold"] = dense_threshold;
    j["threads"] = threads;
    j["out"] = output_path();
    if (subcommand == "quench-small" || subcommand == "j2sweep") j["epsilon"] = epsilon;
    if (subcommand == "quench-large") {
        j["h_initial"] = h_initial;
        j["h_final"] = h_final;
    }
    if (subcommand == "quench-small" || subcommand == "quench-large") {
        j["t_max"] = t_max;
        j["samples"] = samples;
        j["bins"] = bins;
    }
    if (subcommand == "entmap") j["psi1_mode"] = psi1_mode;
    if (subcommand == "approx") {
        j["jadd_lo"] = jadd_lo;
        j["jadd_hi"] = jadd_hi;
        j["jadd_steps"] = jadd_steps;
    }
    j["version"] = kVersion;
    j["field_convention"] = "+h*sum_j S^z_j on sites 0..nprime-1; positive h favors down spins";
    return j.dump();
}

RunConfig parse_cli(int argc, const char* const* argv, bool& run, std::string& help_text) {
    RunConfig cfg;
    run = true;
    help_text.clear();

    CLI::App app{"exact diagonalization of spin-1/2 J1-J2 chains in a local field", "mgchain"};
    app.require_subcommand(0, 1);
    // the default help short name -h would block the --h flag
    app.set_help_flag("--help", "print usage and exit");

    std::string hrange_text, j2range_text, boundary_text = "open", config_path;
    double h_single = 0.0, j2_single = 0.5;

    struct SubRefs {
        CLI::App* sub = nullptr;
        CLI::Option* h = nullptr;
        CLI::Option* hrange = nullptr;
        CLI::Option* j2 = nullptr;
        CLI::Option* j2range = nullptr;
        CLI::Option* sectors = nullptr;
        CLI::Option* config = nullptr;
    };
    std::vector<SubRefs> refs;

    const std::pair<const char*, const char*> subs[] = {
        {"ground", "sector ground states and singlet distances over a field sweep"},
        {"entmap", "entanglement map of one (h, sector) ground state"},
        {"quench-small", "initial distance from the time average after a small field quench"},
        {"quench-large", "full time series and histograms for a finite field quench"},
        {"j2sweep", "(h, J2) grid of quench distances plus the h=0 gap per J2"},
        {"approx", "effective-coupling fit of the strong-field ground state"},
        {"gap", "spectral gap across all polarization sectors"},
        {"selftest", "internal consistency checks"},
    };

    for (const auto& [name, desc] : subs) {
        auto* sub = app.add_subcommand(name, desc);
        sub->set_help_flag("--help", "print usage and exit");
        SubRefs r;
        r.sub = sub;
        sub->add_option("--n", cfg.n, "number of sites N");
        sub->add_option("--nprime", cfg.nprime, "field region size N'");
        r.j2 = sub->add_option("--j2", j2_single, "next-nearest-neighbour coupling J2");
        r.j2range = sub->add_option("--j2-range", j2range_text, "J2 range lo:hi:step");
        r.h = sub->add_option("--h", h_single, "field strength h");
        r.hrange = sub->add_option("--h-range", hrange_text, "field range lo:hi:step");
        sub->add_option("--boundary", boundary_text, "open|periodic")
            ->check(CLI::IsMember({"open", "periodic"}));
        r.sectors = sub->add_option("--sectors", cfg.sectors_l,
                                    "sector polarizations L, comma separated")
                        ->delimiter(',');
        sub->add_option("--seed", cfg.seed, "deterministic solver seed");
        sub->add_option("--dense-threshold", cfg.dense_threshold,
                        "largest dimension allowed a full dense solve");
        sub->add_option("--threads", cfg.threads, "worker threads, 0 = hardware");
        sub->add_option("--out", cfg.out, "output path (default <command>.csv)");
        r.config = sub->add_option("--config", config_path,
                                   "key=value config file; explicit flags win");
        r.h->excludes(r.hrange);
        r.j2->excludes(r.j2range);

        const std::string nm = name;
        if (nm == "quench-small" || nm == "quench-large" || nm == "j2sweep") {
            sub->add_option("--epsilon", cfg.epsilon, "small-quench field offset");
            sub->add_option("--h-initial", cfg.h_initial, "pre-quench field");
            sub->add_option("--h-final", cfg.h_final, "post-quench field");
            sub->add_option("--tmax", cfg.t_max, "evolution time span");
            sub->add_option("--samples", cfg.samples, "time samples");
            sub->add_option("--bins", cfg.bins, "histogram bins");
        }
        if (nm == "entmap")
            sub->add_flag("--psi1", cfg.psi1_mode,
                          "map the dimer covering state instead of a ground state");
        if (nm == "approx") {
            sub->add_option("--jadd-lo", cfg.jadd_lo, "scan lower bound");
            sub->add_option("--jadd-hi", cfg.jadd_hi, "scan upper bound");
            sub->add_option("--jadd-steps", cfg.jadd_steps, "scan grid points");
        }
        refs.push_back(r);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success&) {
        run = false;
        help_text = app.help();
        for (CLI::App* sub : app.get_subcommands()) help_text = sub->help();
        return cfg;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    const auto parsed = app.get_subcommands();
    if (parsed.empty())
        throw ConfigError("missing subcommand; see 'mgchain --help'");
    cfg.subcommand = parsed.front()->get_name();

    const SubRefs* r = nullptr;
    for (const auto& s : refs)
        if (s.sub == parsed.front()) r = &s;

    bool use_h = r->h->count() > 0;
    bool use_hrange = r->hrange->count() > 0;
    bool use_j2 = r->j2->count() > 0;
    bool use_j2range = r->j2range->count() > 0;
    bool file_sectors = false;

    if (r->config->count() > 0) {
        // CLI11 never processes a config file attached to a subcommand, so
        // the file is applied by hand: flat key=value lines named after the
        // long flags, with explicit flags winning over file values.
        bool file_h = false, file_hrange = false, file_j2 = false, file_j2range = false;
        for (const auto& [key, value] : read_config_file(config_path)) {
            const std::string flag = "--" + key;
            if (key == "config")
                throw ConfigError("config file: nested config keys are not allowed");
            CLI::Option* opt = r->sub->get_option_no_throw(flag);
            if (opt == nullptr)
                throw ConfigError("config file: unknown key '" + key + "' for '" +
                                  cfg.subcommand + "'");
            if (opt->count() > 0) continue; // an explicit flag wins
            if (key == "h" || key == "h-range") {
                if (use_h || use_hrange) continue; // either CLI variant wins
                if (file_h || file_hrange)
                    throw ConfigError("config file: h and h-range are exclusive");
                if (key == "h") {
                    h_single = parse_double(value, flag);
                    file_h = true;
                } else {
                    hrange_text = value;
                    file_hrange = true;
                }
            } else if (key == "j2" || key == "j2-range") {
                if (use_j2 || use_j2range) continue;
                if (file_j2 || file_j2range)
                    throw ConfigError("config file: j2 and j2-range are exclusive");
                if (key == "j2") {
                    j2_single = parse_double(value, flag);
                    file_j2 = true;
                } else {
                    j2range_text = value;
                    file_j2range = true;
                }
            } else if (key == "n") {
                cfg.n = static_cast<int>(parse_integer(value, flag));
            } else if (key == "nprime") {
                cfg.nprime = static_cast<int>(parse_integer(value, flag));
            } else if (key == "boundary") {
                if (value != "open" && value != "periodic")
                    throw ConfigError("--boundary: expected open|periodic, got '" + value + "'");
                boundary_text = value;
            } else if (key == "sectors") {
                cfg.sectors_l.clear();
                std::istringstream sin(value);
                for (std::string cur; std::getline(sin, cur, ',');)
                    cfg.sectors_l.push_back(parse_double(cur, flag));
                file_sectors = true;
            } else if (key == "seed") {
                const long long v = parse_integer(value, flag);
                if (v < 0) throw ConfigError("--seed: must be non-negative");
                cfg.seed = static_cast<std::uint64_t>(v);
            } else if (key == "dense-threshold") {
                const long long v = parse_integer(value, flag);
                if (v < 1) throw ConfigError("--dense-threshold must be positive");
                cfg.dense_threshold = static_cast<std::size_t>(v);
            } else if (key == "threads") {
                cfg.threads = static_cast<int>(parse_integer(value, flag));
            } else if (key == "out") {
                cfg.out = value;
            } else if (key == "epsilon") {
                cfg.epsilon = parse_double(value, flag);
            } else if (key == "h-initial") {
                cfg.h_initial = parse_double(value, flag);
            } else if (key == "h-final") {
                cfg.h_final = parse_double(value, flag);
            } else if (key == "tmax") {
                cfg.t_max = parse_double(value, flag);
            } else if (key == "samples") {
                cfg.samples = static_cast<int>(parse_integer(value, flag));
            } else if (key == "bins") {
                cfg.bins = static_cast<int>(parse_integer(value, flag));
            } else if (key == "psi1") {
                cfg.psi1_mode = parse_bool(value, flag);
            } else if (key == "jadd-lo") {
                cfg.jadd_lo = parse_double(value, flag);
            } else if (key == "jadd-hi") {
                cfg.jadd_hi = parse_double(value, flag);
            } else if (key == "jadd-steps") {
                cfg.jadd_steps = static_cast<int>(parse_integer(value, flag));
            } else {
                throw ConfigError("config file: key '" + key + "' has no file handler");
            }
        }
        use_h = use_h || file_h;
        use_hrange = use_hrange || file_hrange;
        use_j2 = use_j2 || file_j2;
        use_j2range = use_j2range || file_j2range;
    }

    if (use_hrange)
        cfg.h = Range::parse(hrange_text, "--h-range");
    else if (use_h)
        cfg.h = Range::from_value(h_single);
    if (use_j2range)
        cfg.j2 = Range::parse(j2range_text, "--j2-range");
    else if (use_j2)
        cfg.j2 = Range::from_value(j2_single);
    cfg.boundary = boundary_text == "periodic" ? Boundary::periodic : Boundary::open;
    cfg.sectors_set = r->sectors->count() > 0 || file_sectors;

    validate(cfg);
    return cfg;
}

} // namespace mgchain
