#include "mgchain/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mgchain/errors.hpp"

namespace mgchain {

namespace {

void check_base(const ChainSpec& base) {
    if (base.boundary != Boundary::open)
        throw DomainError("effective model: defined for open chains only");
    if (base.n_field < 1)
        throw DomainError("effective model: needs at least one field site");
    if (base.n_sites - base.n_field < 2)
        throw DomainError("effective model: residual chain needs at least 2 sites");
}

// Residual chain (full sites n_field..n-1 relabeled 0..m-1): open J1 bonds
// with j_add folded into the bond nearest the field edge; J2 bonds kept only
// where both ends stay inside the residual region.
std::vector<Bond> residual_bonds(const ChainSpec& base, double j_add) {
    const int m = base.n_sites - base.n_field;
    std::vector<Bond> bonds;
    for (int i = 0; i + 1 < m; ++i)
        bonds.push_back({i, i + 1, i == 0 ? 1.0 + j_add : 1.0});
    if (base.j2 != 0.0)
        for (int i = 0; i + 2 < m; ++i)
            bonds.push_back({i, i + 2, base.j2});
    return bonds;
}

struct ResidualGround {
    Eigen::VectorXd vector;
    int twice_l = 0;
    double energy = 0.0;
    bool tie = false;
};

ResidualGround solve_one(const std::vector<Bond>& bonds, const Sector& sec,
                         std::size_t dense_threshold, const LanczosOptions& opts) {
    const auto op = build_operator(bonds, {}, sec);
    const int k = std::min<int>(2, static_cast<int>(sec.dim()));
    const EigenSystem sys = lowest_pairs(op, k, dense_threshold, opts);
    ResidualGround out;
    out.vector = sys.vectors.col(0);
    out.twice_l = sec.twice_l();
    out.energy = sys.energies[0];
    out.tie = k > 1 && sys.energies[1] - sys.energies[0] <= degeneracy_tol(sys.energies[0]);
    return out;
}

ResidualGround solve_residual(const std::vector<Bond>& bonds, int m,
                              std::optional<int> twice_l, std::size_t dense_threshold,
                              const LanczosOptions& opts) {
    if (twice_l) return solve_one(bonds, Sector(m, *twice_l), dense_threshold, opts);

    // scan every residual sector; dimensions differ, so no warm starts here
    LanczosOptions local = opts;
    local.warm_start = nullptr;
    std::vector<ResidualGround> all;
    for (int l : Sector::all_twice_l(m))
        all.push_back(solve_one(bonds, Sector(m, l), dense_threshold, local));
    const auto best = std::min_element(all.begin(), all.end(),
                                       [](const auto& x, const auto& y) { return x.energy < y.energy; });
    for (const auto& g : all)
        if (&g != &*best && g.energy - best->energy <= degeneracy_tol(best->energy))
            best->tie = true;
    return *best;
}

} // namespace

EffectiveGround effective_ground(const EffectiveSpec& spec, std::optional<int> residual_twice_l,
                                 std::size_t dense_threshold, const LanczosOptions& opts) {
    check_base(spec.base);
    const int m = spec.base.n_sites - spec.base.n_field;
    const ResidualGround rg =
        solve_residual(residual_bonds(spec.base, spec.j_add), m, residual_twice_l,
                       dense_threshold, opts);

    // frozen field spins are all down, so the embedded bits are just the
    // residual bits shifted past the field region
    const int full_twice_l = rg.twice_l - spec.base.n_field;
    auto full_sec = std::make_shared<Sector>(spec.base.n_sites, full_twice_l);
    const Sector resid_sec(m, rg.twice_l);
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(full_sec->dim()));
    for (std::size_t i = 0; i < resid_sec.dim(); ++i) {
        const BasisState bits = resid_sec.state(i) << spec.base.n_field;
        amp[static_cast<Eigen::Index>(full_sec->rank(bits))] = rg.vector[static_cast<Eigen::Index>(i)];
    }
    return EffectiveGround{PureState(std::move(full_sec), std::move(amp)), full_twice_l,
                           rg.twice_l, rg.energy, rg.tie};
}

ApproxReport fit_j_add(const ChainSpec& base, double lo, double hi, int steps,
                       std::size_t dense_threshold, const LanczosOptions& opts) {
    check_base(base);
    if (!(lo < hi) || steps < 2)
        throw DomainError("fit_j_add: need lo < hi and at least 2 grid points");

    const int m = base.n_sites - base.n_field;

    LanczosOptions exact_opts = opts;
    exact_opts.warm_start = nullptr;
    const auto sectors = Sector::all_twice_l(base.n_sites);
    const GroundReport exact = global_ground(base, sectors, exact_opts, dense_threshold);

    ApproxReport rep;
    rep.exact_twice_l = exact.global().twice_l;
    rep.exact_tie = !exact.global_unique;
    rep.exact_energy = exact.global().energy;

    const int resid_twice_l = rep.exact_twice_l + base.n_field;
    if (resid_twice_l < -m || resid_twice_l > m)
        throw DomainError("fit_j_add: exact ground sector 2L=" +
                          std::to_string(rep.exact_twice_l) +
                          " has no image with the field spins frozen");

    // embedding map: residual basis index -> position in the exact sector
    const Sector resid_sec(m, resid_twice_l);
    const Sector full_sec(base.n_sites, rep.exact_twice_l);
    std::vector<Eigen::Index> emb(resid_sec.dim());
    for (std::size_t i = 0; i < resid_sec.dim(); ++i)
        emb[i] = static_cast<Eigen::Index>(full_sec.rank(resid_sec.state(i) << base.n_field));

    const Eigen::VectorXd& psi_exact = exact.global().vector;
    const int k = std::min<int>(2, static_cast<int>(resid_sec.dim()));
    Eigen::VectorXd warm;

    auto overlap_at = [&](double j) {
        const auto op = build_operator(residual_bonds(base, j), {}, resid_sec);
        LanczosOptions lopts = opts;
        lopts.warm_start = warm.size() > 0 ? &warm : nullptr;
        const EigenSystem sys = lowest_pairs(op, k, dense_threshold, lopts);
        warm = sys.vectors.col(0);
        double dot = 0.0;
        for (std::size_t i = 0; i < resid_sec.dim(); ++i)
            dot += warm[static_cast<Eigen::Index>(i)] * psi_exact[emb[i]];
        return std::abs(dot);
    };

    rep.j_add_grid.resize(steps);
    rep.overlaps.resize(steps);
    int best_idx = 0;
    for (int i = 0; i < steps; ++i) {
        rep.j_add_grid[i] = lo + (hi - lo) * i / (steps - 1);
        rep.overlaps[i] = overlap_at(rep.j_add_grid[i]);
        if (rep.overlaps[i] > rep.overlaps[best_idx]) best_idx = i;
    }
    rep.boundary_warning = best_idx == 0 || best_idx == steps - 1;
    rep.best_j_add = rep.j_add_grid[best_idx];
    rep.best_overlap = rep.overlaps[best_idx];

    // golden-section refinement of the maximum between the neighbouring cells
    double a = rep.j_add_grid[std::max(best_idx - 1, 0)];
    double b = rep.j_add_grid[std::min(best_idx + 1, steps - 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = overlap_at(x1), f2 = overlap_at(x2);
    while (b - a > 1e-4) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = overlap_at(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = overlap_at(x1);
        }
    }
    if (f1 > rep.best_overlap) { rep.best_overlap = f1; rep.best_j_add = x1; }
    if (f2 > rep.best_overlap) { rep.best_overlap = f2; rep.best_j_add = x2; }
    return rep;
}

} // namespace mgchain
