#include "mgchain/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <lapacke.h>

#include "mgchain/errors.hpp"

namespace mgchain {

namespace {

// Below this dimension Eigen's solver beats the LAPACK call overhead and
// keeps the pure-C++ path exercised.
constexpr std::size_t kLapackMin = 512;

EigenSystem truncate(EigenSystem sys, int k) {
    if (sys.n_pairs() == k) return sys;
    EigenSystem out;
    out.energies = sys.energies.head(k);
    out.vectors = sys.vectors.leftCols(k);
    out.full = (static_cast<Eigen::Index>(k) == sys.vectors.rows());
    return out;
}

} // namespace

std::vector<std::pair<Eigen::Index, Eigen::Index>>
degenerate_groups(const Eigen::VectorXd& energies) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;
    if (energies.size() == 0) return groups;
    const double tol = degeneracy_tol(energies[0]);
    Eigen::Index begin = 0;
    for (Eigen::Index i = 1; i <= energies.size(); ++i) {
        if (i == energies.size() || energies[i] - energies[i - 1] > tol) {
            groups.emplace_back(begin, i);
            begin = i;
        }
    }
    return groups;
}

EigenSystem dense_eig(const SparseOperator& op, std::size_t dense_threshold) {
    const std::size_t n = op.dim();
    if (n > dense_threshold)
        throw CapacityError("dense_eig: dimension " + std::to_string(n) +
                            " exceeds dense threshold " + std::to_string(dense_threshold) +
                            "; use lanczos_extremal for extremal pairs");
    EigenSystem out;
    out.full = true;
    if (n < kLapackMin) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.to_dense());
        if (es.info() != Eigen::Success)
            throw SolverError("dense_eig: Eigen solver failed", 0.0);
        out.energies = es.eigenvalues();
        out.vectors = es.eigenvectors();
        return out;
    }
    Eigen::MatrixXd a = op.to_dense();
    const auto ln = static_cast<lapack_int>(n);
    Eigen::VectorXd w(ln);
    Eigen::MatrixXd z(ln, ln);
    std::vector<lapack_int> isuppz(2 * n);
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', ln, a.data(), ln, 0.0, 0.0, 0, 0,
                       0.0, &found, w.data(), z.data(), ln, isuppz.data());
    if (info != 0 || found != ln)
        throw SolverError("dense_eig: dsyevr failed (info=" + std::to_string(info) + ")", 0.0);
    out.energies = std::move(w);
    out.vectors = std::move(z);
    return out;
}

EigenSystem lowest_pairs(const SparseOperator& op, int k, std::size_t dense_threshold,
                         const LanczosOptions& opts) {
    const std::size_t n = op.dim();
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw DomainError("lowest_pairs: k=" + std::to_string(k) + " outside [1," +
                          std::to_string(n) + "]");
    if (n <= kLapackMin && n <= dense_threshold) return truncate(dense_eig(op, dense_threshold), k);
    return lanczos_extremal(op, k, opts);
}

GroundReport global_ground(const ChainSpec& spec, std::span<const int> twice_l_list,
                           const LanczosOptions& opts, std::size_t dense_threshold,
                           bool check_internal_degeneracy) {
    if (twice_l_list.empty()) throw DomainError("global_ground: empty sector list");
    GroundReport report;
    std::vector<double> second_level(twice_l_list.size(),
                                     std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < twice_l_list.size(); ++i) {
        Sector sec(spec.n_sites, twice_l_list[i]);
        auto op = build_hamiltonian(spec, sec);
        const int k = check_internal_degeneracy ? std::min<int>(2, static_cast<int>(sec.dim())) : 1;
        EigenSystem sys = lowest_pairs(op, k, dense_threshold, opts);
        report.per_sector.push_back({twice_l_list[i], sys.energies[0], sys.vectors.col(0)});
        if (k > 1) second_level[i] = sys.energies[1];
    }
    report.global_index = 0;
    for (std::size_t i = 1; i < report.per_sector.size(); ++i)
        if (report.per_sector[i].energy < report.per_sector[report.global_index].energy)
            report.global_index = static_cast<int>(i);
    const double e0 = report.per_sector[report.global_index].energy;
    const double tol = degeneracy_tol(e0);
    for (std::size_t i = 0; i < report.per_sector.size(); ++i) {
        if (report.per_sector[i].energy - e0 <= tol) {
            report.tied_twice_l.push_back(report.per_sector[i].twice_l);
            // an in-sector degenerate ground registers the sector twice
            if (std::isfinite(second_level[i]) && second_level[i] - e0 <= tol)
                report.tied_twice_l.push_back(report.per_sector[i].twice_l);
        }
    }
    report.global_unique = report.tied_twice_l.size() == 1;
    return report;
}

GroundReport spectral_gap(const ChainSpec& spec, const LanczosOptions& opts,
                          std::size_t dense_threshold) {
    const bool mirror = (spec.h == 0.0 || spec.n_field == 0);
    std::vector<int> sectors;
    for (int t : Sector::all_twice_l(spec.n_sites))
        if (!mirror || t >= 0) sectors.push_back(t);

    GroundReport report;
    std::vector<double> all_levels;
    for (int t : sectors) {
        Sector sec(spec.n_sites, t);
        auto op = build_hamiltonian(spec, sec);
        const int k = std::min<int>(3, static_cast<int>(sec.dim()));
        EigenSystem sys = lowest_pairs(op, k, dense_threshold, opts);
        report.per_sector.push_back({t, sys.energies[0], sys.vectors.col(0)});
        for (Eigen::Index i = 0; i < sys.n_pairs(); ++i) {
            all_levels.push_back(sys.energies[i]);
            // mirrored sector contributes the same levels at -L
            if (mirror && t > 0) all_levels.push_back(sys.energies[i]);
        }
    }
    report.global_index = 0;
    for (std::size_t i = 1; i < report.per_sector.size(); ++i)
        if (report.per_sector[i].energy < report.per_sector[report.global_index].energy)
            report.global_index = static_cast<int>(i);

    std::sort(all_levels.begin(), all_levels.end());
    const double e0 = all_levels.front();
    const double tol = degeneracy_tol(e0);
    double e1 = std::numeric_limits<double>::quiet_NaN();
    for (double e : all_levels) {
        if (e - e0 > tol) {
            e1 = e;
            break;
        }
    }
    if (!std::isfinite(e1))
        throw SolverError("spectral_gap: no distinct second level among the lowest "
                          "eigenvalues; spectrum appears flat",
                          0.0);
    for (const auto& sg : report.per_sector)
        if (sg.energy - e0 <= tol) report.tied_twice_l.push_back(sg.twice_l);
    const long e0_multiplicity =
        std::count_if(all_levels.begin(), all_levels.end(),
                      [&](double e) { return e - e0 <= tol; });
    report.global_unique = e0_multiplicity == 1;
    report.gap = e1 - e0;
    return report;
}

} // namespace mgchain
