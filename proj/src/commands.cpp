#include "mgchain/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mgchain/approx.hpp"
#include "mgchain/dynamics.hpp"
#include "mgchain/eigensolve.hpp"
#include "mgchain/errors.hpp"
#include "mgchain/observables.hpp"
#include "mgchain/states.hpp"
#include "mgchain/sweep.hpp"

namespace mgchain {

namespace {

int worker_count(const RunConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string boundary_name(Boundary b) {
    return b == Boundary::open ? "open" : "periodic";
}

std::string sector_label(int twice_l) { return format_double(twice_l / 2.0); }

void require_single(const Range& r, const std::string& flag, const std::string& cmd) {
    if (!r.single)
        throw ConfigError(cmd + ": " + flag + " must be a single value here");
}

// log10 with an explicit floor for exact zeros, for the log-scaled copies
std::string log10_field(double v) {
    return format_double(v > 0.0 ? std::log10(v) : -std::numeric_limits<double>::infinity());
}

// classification of a failed cell for the process exit code
int classify(const std::exception& e) {
    if (dynamic_cast<const CapacityError*>(&e)) return kExitCapacity;
    if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
    if (dynamic_cast<const DomainError*>(&e)) return kExitConfig;
    return kExitSolver;
}

struct CellStatus {
    bool ok = false;
    std::string error;
    int code = kExitOk;

    void fail(const std::exception& e) {
        ok = false;
        error = e.what();
        code = classify(e);
    }
};

// exit policy for sweeps: success if any cell made it, else the first error
template <class Cell>
int sweep_exit(const std::vector<Cell>& cells) {
    for (const auto& c : cells)
        if (c.status.ok) return kExitOk;
    return cells.empty() ? kExitOk : cells.front().status.code;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file: " + path);
    return f;
}

} // namespace

int cmd_ground(const RunConfig& cfg) {
    require_single(cfg.j2, "--j2", "ground");
    const auto hs = cfg.h.values();
    const auto tls = cfg.sectors_twice_l();
    const double j2v = cfg.j2.lo;

    struct Cell {
        CellStatus status;
        double e0 = 0.0;
        bool tie = false, global = false;
        double l5 = 0.0, far_pol = 0.0;
        DistanceSet dist{};
    };

    std::optional<CoveringPair> cov;
    if (cfg.n % 2 == 0) cov = mg_covering_states(cfg.n, cfg.boundary);

    std::vector<std::function<std::vector<Cell>()>> tasks;
    for (int tl : tls)
        tasks.push_back([&cfg, &cov, hs, tl, j2v] {
            std::vector<Cell> out;
            Eigen::VectorXd warm;
            for (double h : hs) {
                Cell c;
                try {
                    auto sec = std::make_shared<Sector>(cfg.n, tl);
                    const ChainSpec spec{cfg.n, j2v, cfg.boundary, h, cfg.nprime};
                    const auto op = build_hamiltonian(spec, *sec);
                    LanczosOptions opts;
                    opts.seed = cfg.seed;
                    opts.warm_start = warm.size() > 0 ? &warm : nullptr;
                    const int k = std::min<int>(2, static_cast<int>(sec->dim()));
                    const EigenSystem sys = lowest_pairs(op, k, cfg.dense_threshold, opts);
                    warm = sys.vectors.col(0);
                    c.e0 = sys.energies[0];
                    c.tie = k > 1 &&
                            sys.energies[1] - sys.energies[0] <= degeneracy_tol(sys.energies[0]);
                    const PureState psi(sec, Eigen::VectorXd(sys.vectors.col(0)));
                    std::vector<int> outside;
                    for (int s = cfg.nprime; s < cfg.n; ++s) outside.push_back(s);
                    c.l5 = outside.empty() ? 0.0 : region_polarization(psi, outside);
                    const auto far = far_sites(cfg.n, 2, cfg.boundary, cfg.nprime);
                    c.far_pol = region_polarization(psi, far);
                    const DensityMatrix rho = partial_trace(psi, far);
                    c.dist = cov ? distance_set(rho, *cov) : distance_set(rho);
                    c.status.ok = true;
                } catch (const std::exception& e) {
                    c.status.fail(e);
                }
                out.push_back(std::move(c));
            }
            return out;
        });

    auto grids = run_tasks(tasks, worker_count(cfg));

    // flag the lowest-energy sector (ties included) among those requested
    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
        double emin = std::numeric_limits<double>::infinity();
        for (const auto& g : grids)
            if (g[hi].status.ok) emin = std::min(emin, g[hi].e0);
        for (auto& g : grids)
            if (g[hi].status.ok && g[hi].e0 - emin <= degeneracy_tol(emin))
                g[hi].global = true;
    }

    CsvTable table;
    table.columns = {"n", "nprime", "boundary", "j2", "h", "sector_l", "quantity", "value"};
    std::vector<Cell> flat;
    for (std::size_t si = 0; si < tls.size(); ++si) {
        for (std::size_t hi = 0; hi < hs.size(); ++hi) {
            const Cell& c = grids[si][hi];
            auto put = [&](const std::string& q, const std::string& v) {
                table.rows.push_back({{std::to_string(cfg.n), std::to_string(cfg.nprime),
                                       boundary_name(cfg.boundary), format_double(j2v),
                                       format_double(hs[hi]), sector_label(tls[si]), q, v}});
            };
            if (!c.status.ok) {
                put("error", c.status.error);
            } else {
                put("energy_e0", format_double(c.e0));
                put("ground_tie", c.tie ? "1" : "0");
                put("is_global_ground", c.global ? "1" : "0");
                put("eq5_l_not_nprime", format_double(c.l5));
                put("far_polarization", format_double(c.far_pol));
                put("eq6_d_singlet", format_double(c.dist.d_singlet));
                if (!std::isnan(c.dist.d_cover)) put("eq9_d_cover", format_double(c.dist.d_cover));
                put("eq10_d_subspace", format_double(c.dist.d_subspace));
                put("eq10_alpha_star", format_double(c.dist.alpha_star));
            }
            flat.push_back(c);
        }
    }
    write_csv(cfg.output_path(), cfg.echo_json(), table);
    return sweep_exit(flat);
}

int cmd_entmap(const RunConfig& cfg) {
    require_single(cfg.j2, "--j2", "entmap");
    require_single(cfg.h, "--h", "entmap");

    PureState psi = [&] {
        if (cfg.psi1_mode) return mg_covering_states(cfg.n, cfg.boundary).psi1;
        const int tl = cfg.sectors_twice_l().front();
        auto sec = std::make_shared<Sector>(cfg.n, tl);
        const ChainSpec spec{cfg.n, cfg.j2.lo, cfg.boundary, cfg.h.lo, cfg.nprime};
        LanczosOptions opts;
        opts.seed = cfg.seed;
        const EigenSystem sys =
            lowest_pairs(build_hamiltonian(spec, *sec), 1, cfg.dense_threshold, opts);
        return PureState(sec, Eigen::VectorXd(sys.vectors.col(0)));
    }();

    const EntanglementMap em = entanglement_map(psi);
    auto f = open_output(cfg.output_path());
    write_header_lines(f, cfg.echo_json());
    auto dump = [&](const char* label, const Eigen::MatrixXd& m) {
        f << "# map=" << label << "\n";
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                f << (j ? "," : "") << format_double(m(i, j));
            f << "\n";
        }
    };
    dump("eq20_raw", em.raw);
    dump("eq20_normalized", em.normalized);
    f.flush();
    if (!f) throw ConfigError("write failed: " + cfg.output_path());
    return kExitOk;
}

int cmd_quench_small(const RunConfig& cfg) {
    require_single(cfg.j2, "--j2", "quench-small");
    const auto hs = cfg.h.values();
    const auto tls = cfg.sectors_twice_l();
    const double j2v = cfg.j2.lo;

    struct Cell {
        CellStatus status;
        QuenchTrace trace;
    };

    std::vector<std::function<std::vector<Cell>()>> tasks;
    for (int tl : tls)
        tasks.push_back([&cfg, hs, tl, j2v] {
            std::vector<Cell> out;
            for (double h : hs) {
                Cell c;
                try {
                    QuenchSpec qs;
                    qs.chain = ChainSpec{cfg.n, j2v, cfg.boundary, h, cfg.nprime};
                    qs.pre_field = h + cfg.epsilon;
                    qs.twice_l = tl;
                    qs.grid = TimeGrid{cfg.t_max, cfg.samples};
                    qs.seed = cfg.seed;
                    qs.dense_threshold = cfg.dense_threshold;
                    c.trace = small_quench(qs, false);
                    c.status.ok = true;
                } catch (const std::exception& e) {
                    c.status.fail(e);
                }
                out.push_back(std::move(c));
            }
            return out;
        });

    auto grids = run_tasks(tasks, worker_count(cfg));

    CsvTable table;
    table.columns = {"n",       "nprime",   "boundary", "j2",      "h",
                     "epsilon", "sector_l", "quantity", "value"};
    std::vector<Cell> flat;
    for (std::size_t si = 0; si < tls.size(); ++si)
        for (std::size_t hi = 0; hi < hs.size(); ++hi) {
            Cell& c = grids[si][hi];
            auto put = [&](const std::string& q, const std::string& v) {
                table.rows.push_back(
                    {{std::to_string(cfg.n), std::to_string(cfg.nprime),
                      boundary_name(cfg.boundary), format_double(j2v), format_double(hs[hi]),
                      format_double(cfg.epsilon), sector_label(tls[si]), q, v}});
            };
            if (!c.status.ok) {
                put("error", c.status.error);
            } else {
                put("eq14_d_av0", format_double(c.trace.d_av0));
                put("eq14_d_av0_log10", log10_field(c.trace.d_av0));
                put("pre_ground_tie", c.trace.pre_ground_tie ? "1" : "0");
                put("pre_energy", format_double(c.trace.pre_energy));
                put("energy_e0", format_double(c.trace.post_ground_energy));
            }
            flat.push_back(std::move(c));
        }
    write_csv(cfg.output_path(), cfg.echo_json(), table);
    return sweep_exit(flat);
}

int cmd_quench_large(const RunConfig& cfg) {
    require_single(cfg.j2, "--j2", "quench-large");
    const double j2v = cfg.j2.lo;

    QuenchSpec qs;
    qs.chain = ChainSpec{cfg.n, j2v, cfg.boundary, cfg.h_final, cfg.nprime};
    qs.pre_field = cfg.h_initial;
    qs.grid = TimeGrid{cfg.t_max, cfg.samples};
    qs.seed = cfg.seed;
    qs.dense_threshold = cfg.dense_threshold;
    const QuenchTrace tr = large_quench(qs, cfg.bins);

    CsvTable table;
    table.columns = {"n",        "nprime", "boundary", "j2",     "h_initial", "h_final",
                     "sector_l", "t",      "bin_lo",   "bin_hi", "quantity",  "value"};
    auto put = [&](const std::string& t, const std::string& blo, const std::string& bhi,
                   const std::string& q, const std::string& v) {
        table.rows.push_back({{std::to_string(cfg.n), std::to_string(cfg.nprime),
                               boundary_name(cfg.boundary), format_double(j2v),
                               format_double(cfg.h_initial), format_double(cfg.h_final),
                               sector_label(tr.twice_l), t, blo, bhi, q, v}});
    };
    put("", "", "", "pre_ground_tie", tr.pre_ground_tie ? "1" : "0");
    put("", "", "", "pre_energy", format_double(tr.pre_energy));
    put("", "", "", "energy_e0", format_double(tr.post_ground_energy));
    put("", "", "", "eq14_d_av0", format_double(tr.d_av0));

    auto series = [&](const std::string& q, const std::vector<double>& ys) {
        for (std::size_t i = 0; i < ys.size(); ++i)
            put(format_double(tr.times[i]), "", "", q, format_double(ys[i]));
    };
    series("eq15_le", tr.le);
    series("eq16_l_nprime", tr.l_nprime);
    if (!tr.o_singlet.empty()) series("eq17_o_singlet", tr.o_singlet);
    series("eq18_d_s", tr.d_s);

    auto hist = [&](const std::string& q, const Histogram& hg) {
        if (hg.counts.empty()) return;
        const double width =
            hg.counts.size() > 1 ? (hg.hi - hg.lo) / static_cast<double>(hg.counts.size()) : 0.0;
        for (std::size_t b = 0; b < hg.counts.size(); ++b) {
            const double blo = hg.lo + width * static_cast<double>(b);
            const double bhi = b + 1 == hg.counts.size() ? hg.hi : blo + width;
            put("", format_double(blo), format_double(bhi), q,
                std::to_string(hg.counts[b]));
        }
    };
    hist("eq15_le_hist", tr.le_hist);
    hist("eq16_l_nprime_hist", tr.l_nprime_hist);
    if (!tr.o_singlet.empty()) hist("eq17_o_singlet_hist", tr.o_singlet_hist);
    hist("eq18_d_s_hist", tr.d_s_hist);

    write_csv(cfg.output_path(), cfg.echo_json(), table);
    return kExitOk;
}

int cmd_j2sweep(const RunConfig& cfg) {
    const auto hs = cfg.h.values();
    const auto j2s = cfg.j2.values();
    const int tl = cfg.sectors_set
                       ? cfg.sectors_twice_l().front()
                       : Sector::twice_l_from_double(cfg.n, cfg.n % 2 == 0 ? -1.0 : -0.5);

    struct Cell {
        CellStatus status;
        double d_av0 = 0.0, e0 = 0.0;
        bool pre_tie = false;
        DistanceSet dist{};
    };

    std::optional<CoveringPair> cov;
    if (cfg.n % 2 == 0) cov = mg_covering_states(cfg.n, cfg.boundary);
    const auto far = far_sites(cfg.n, 2, cfg.boundary, cfg.nprime);

    std::vector<std::function<std::vector<Cell>()>> tasks;
    for (double j2v : j2s)
        tasks.push_back([&cfg, &cov, &far, hs, j2v, tl] {
            std::vector<Cell> out;
            Eigen::VectorXd warm;
            for (double h : hs) {
                Cell c;
                try {
                    auto sec = std::make_shared<Sector>(cfg.n, tl);
                    const ChainSpec post{cfg.n, j2v, cfg.boundary, h, cfg.nprime};
                    const EigenSystem post_sys =
                        dense_eig(build_hamiltonian(post, *sec), cfg.dense_threshold);
                    c.e0 = post_sys.energies[0];

                    ChainSpec pre = post;
                    pre.h = h + cfg.epsilon;
                    LanczosOptions opts;
                    opts.seed = cfg.seed;
                    opts.warm_start = warm.size() > 0 ? &warm : nullptr;
                    const int k = std::min<int>(2, static_cast<int>(sec->dim()));
                    const EigenSystem pre_sys =
                        lowest_pairs(build_hamiltonian(pre, *sec), k, cfg.dense_threshold, opts);
                    warm = pre_sys.vectors.col(0);
                    c.pre_tie = k > 1 && pre_sys.energies[1] - pre_sys.energies[0] <=
                                             degeneracy_tol(pre_sys.energies[0]);

                    const PureState psi0(sec, Eigen::VectorXd(pre_sys.vectors.col(0)));
                    const DensityMatrix rho_bar = time_averaged_state(post_sys, psi0, far);
                    const DensityMatrix rho0 = partial_trace(psi0, far);
                    c.d_av0 = trace_norm(rho0.matrix() - rho_bar.matrix());

                    const PureState ground(sec, Eigen::VectorXd(post_sys.vectors.col(0)));
                    const DensityMatrix rho_g = partial_trace(ground, far);
                    c.dist = cov ? distance_set(rho_g, *cov) : distance_set(rho_g);
                    c.status.ok = true;
                } catch (const std::exception& e) {
                    c.status.fail(e);
                }
                out.push_back(std::move(c));
            }
            return out;
        });

    struct GapCell {
        CellStatus status;
        double gap = 0.0;
    };
    std::vector<std::function<GapCell()>> gap_tasks;
    for (double j2v : j2s)
        gap_tasks.push_back([&cfg, j2v] {
            GapCell g;
            try {
                LanczosOptions opts;
                opts.seed = cfg.seed;
                const ChainSpec spec{cfg.n, j2v, cfg.boundary, 0.0, cfg.nprime};
                const GroundReport rep = spectral_gap(spec, opts, cfg.dense_threshold);
                g.gap = rep.gap.value();
                g.status.ok = true;
            } catch (const std::exception& e) {
                g.status.fail(e);
            }
            return g;
        });

    auto grids = run_tasks(tasks, worker_count(cfg));
    auto gaps = run_tasks(gap_tasks, worker_count(cfg));

    CsvTable table;
    table.columns = {"n",       "nprime",   "boundary", "j2",      "h",
                     "epsilon", "sector_l", "quantity", "value"};
    std::vector<Cell> flat;
    for (std::size_t ji = 0; ji < j2s.size(); ++ji)
        for (std::size_t hi = 0; hi < hs.size(); ++hi) {
            const Cell& c = grids[ji][hi];
            auto put = [&](const std::string& q, const std::string& v) {
                table.rows.push_back(
                    {{std::to_string(cfg.n), std::to_string(cfg.nprime),
                      boundary_name(cfg.boundary), format_double(j2s[ji]), format_double(hs[hi]),
                      format_double(cfg.epsilon), sector_label(tl), q, v}});
            };
            if (!c.status.ok) {
                put("error", c.status.error);
            } else {
                put("eq14_d_av0", format_double(c.d_av0));
                put("eq14_d_av0_log10", log10_field(c.d_av0));
                put("eq9_d_cover",
                    std::isnan(c.dist.d_cover) ? "" : format_double(c.dist.d_cover));
                put("eq10_d_subspace", format_double(c.dist.d_subspace));
                put("eq10_alpha_star", format_double(c.dist.alpha_star));
                put("energy_e0", format_double(c.e0));
                put("pre_ground_tie", c.pre_tie ? "1" : "0");
            }
            flat.push_back(c);
        }
    for (std::size_t ji = 0; ji < j2s.size(); ++ji) {
        const GapCell& g = gaps[ji];
        CsvRow row{{std::to_string(cfg.n), std::to_string(cfg.nprime),
                    boundary_name(cfg.boundary), format_double(j2s[ji]), "0", "", "",
                    g.status.ok ? "gap" : "error",
                    g.status.ok ? format_double(g.gap) : g.status.error}};
        table.rows.push_back(std::move(row));
    }
    write_csv(cfg.output_path(), cfg.echo_json(), table);
    return sweep_exit(flat);
}

int cmd_approx(const RunConfig& cfg) {
    require_single(cfg.j2, "--j2", "approx");
    require_single(cfg.h, "--h", "approx");
    if (cfg.boundary != Boundary::open)
        throw ConfigError("approx: the effective model is defined for open chains");

    LanczosOptions opts;
    opts.seed = cfg.seed;
    const ChainSpec base{cfg.n, cfg.j2.lo, Boundary::open, cfg.h.lo, cfg.nprime};
    const ApproxReport rep = fit_j_add(base, cfg.jadd_lo, cfg.jadd_hi, cfg.jadd_steps,
                                       cfg.dense_threshold, opts);

    CsvTable table;
    table.columns = {"n", "nprime", "boundary", "j2", "h", "j_add", "quantity", "value"};
    auto put = [&](const std::string& jadd, const std::string& q, const std::string& v) {
        table.rows.push_back({{std::to_string(cfg.n), std::to_string(cfg.nprime),
                               boundary_name(cfg.boundary), format_double(cfg.j2.lo),
                               format_double(cfg.h.lo), jadd, q, v}});
    };
    for (std::size_t i = 0; i < rep.j_add_grid.size(); ++i)
        put(format_double(rep.j_add_grid[i]), "approx_overlap", format_double(rep.overlaps[i]));
    put("", "approx_best_j_add", format_double(rep.best_j_add));
    put("", "approx_best_overlap", format_double(rep.best_overlap));
    put("", "approx_boundary_warning", rep.boundary_warning ? "1" : "0");
    put("", "exact_sector_l", sector_label(rep.exact_twice_l));
    put("", "exact_ground_tie", rep.exact_tie ? "1" : "0");
    put("", "energy_e0", format_double(rep.exact_energy));
    write_csv(cfg.output_path(), cfg.echo_json(), table);
    return kExitOk;
}

int cmd_gap(const RunConfig& cfg) {
    require_single(cfg.j2, "--j2", "gap");
    require_single(cfg.h, "--h", "gap");

    LanczosOptions opts;
    opts.seed = cfg.seed;
    const ChainSpec spec{cfg.n, cfg.j2.lo, cfg.boundary, cfg.h.lo, cfg.nprime};
    const GroundReport rep = spectral_gap(spec, opts, cfg.dense_threshold);

    CsvTable table;
    table.columns = {"n", "nprime", "boundary", "j2", "h", "quantity", "value"};
    auto put = [&](const std::string& q, const std::string& v) {
        table.rows.push_back({{std::to_string(cfg.n), std::to_string(cfg.nprime),
                               boundary_name(cfg.boundary), format_double(cfg.j2.lo),
                               format_double(cfg.h.lo), q, v}});
    };
    put("gap", format_double(rep.gap.value()));
    put("energy_e0", format_double(rep.global().energy));
    put("ground_sector_l", sector_label(rep.global().twice_l));
    put("ground_tie", rep.global_unique ? "0" : "1");
    write_csv(cfg.output_path(), cfg.echo_json(), table);
    return kExitOk;
}

int run_command(const RunConfig& cfg) {
    try {
        if (cfg.subcommand == "ground") return cmd_ground(cfg);
        if (cfg.subcommand == "entmap") return cmd_entmap(cfg);
        if (cfg.subcommand == "quench-small") return cmd_quench_small(cfg);
        if (cfg.subcommand == "quench-large") return cmd_quench_large(cfg);
        if (cfg.subcommand == "j2sweep") return cmd_j2sweep(cfg);
        if (cfg.subcommand == "approx") return cmd_approx(cfg);
        if (cfg.subcommand == "gap") return cmd_gap(cfg);
        if (cfg.subcommand == "selftest") {
            const int failures = run_selftest(std::cout, cfg.seed);
            return failures == 0 ? kExitOk : kExitSolver;
        }
        throw ConfigError("unknown subcommand: " + cfg.subcommand);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what()
                  << " (best residual " << format_double(e.best_residual()) << ")\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}

int cli_main(int argc, const char* const* argv) {
    try {
        bool run = true;
        std::string help_text;
        const RunConfig cfg = parse_cli(argc, argv, run, help_text);
        if (!run) {
            std::cout << help_text;
            return kExitOk;
        }
        return run_command(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

} // namespace mgchain
