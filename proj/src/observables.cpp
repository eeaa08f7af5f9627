#include "mgchain/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mgchain/errors.hpp"

namespace mgchain {

namespace {

double site_weight(BasisState s, std::span<const int> sites) {
    double w = 0.0;
    for (int j : sites) w += ((s >> j) & 1) ? 0.5 : -0.5;
    return w;
}

void check_site_range(int n_sites, std::span<const int> sites, const char* who) {
    for (int s : sites)
        if (s < 0 || s >= n_sites)
            throw DomainError(std::string(who) + ": site " + std::to_string(s) +
                              " outside chain of " + std::to_string(n_sites));
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m, const char* who) {
    if (m.rows() != m.cols()) throw DomainError(std::string(who) + ": matrix not square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw DomainError(std::string(who) + ": matrix not Hermitian within 1e-10");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

} // namespace

double trace_norm(const Eigen::MatrixXcd& m) {
    return hermitian_eigenvalues(m, "trace_norm").cwiseAbs().sum();
}

double region_polarization(const PureState& state, std::span<const int> sites) {
    check_site_range(state.n_sites(), sites, "region_polarization");
    const auto& sec = state.sector();
    double acc = 0.0;
    for (std::size_t i = 0; i < sec.dim(); ++i)
        acc += site_weight(sec.state(i), sites) *
               std::norm(state.amplitudes()[static_cast<Eigen::Index>(i)]);
    return acc;
}

double region_polarization(const DensityMatrix& rho, std::span<const int> sites) {
    // map chain sites to bit positions of the reduced matrix
    std::vector<int> pos;
    for (int s : sites) {
        auto it = std::find(rho.sites().begin(), rho.sites().end(), s);
        if (it == rho.sites().end())
            throw DomainError("region_polarization: site " + std::to_string(s) +
                              " not in the density matrix");
        pos.push_back(static_cast<int>(it - rho.sites().begin()));
    }
    double acc = 0.0;
    for (Eigen::Index d = 0; d < rho.dim(); ++d)
        acc += site_weight(static_cast<BasisState>(d), pos) * rho.matrix()(d, d).real();
    return acc;
}

Eigen::MatrixXcd singlet_projector() {
    // pair (a,b), bit 0 = a: singlet = (|up_a down_b> - |down_a up_b>)/sqrt(2)
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(4);
    s[0b01] = 1.0 / std::sqrt(2.0);
    s[0b10] = -1.0 / std::sqrt(2.0);
    return s * s.adjoint();
}

double singlet_distance(const DensityMatrix& rho) {
    if (rho.dim() != 4)
        throw DomainError("singlet_distance: need a two-spin state, got dim " +
                          std::to_string(rho.dim()));
    return 0.5 * trace_norm(rho.matrix() - singlet_projector());
}

DistanceSet distance_set(const DensityMatrix& rho) {
    if (rho.dim() != 4)
        throw DomainError("distance_set: need a two-spin state, got dim " +
                          std::to_string(rho.dim()));
    DistanceSet out{};
    out.d_singlet = singlet_distance(rho);
    out.d_cover = std::numeric_limits<double>::quiet_NaN();

    // d_subspace: golden-section over the affine family (1-a) P_s + (a/4) I;
    // the objective is convex in a.
    const Eigen::MatrixXcd p = singlet_projector();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(4, 4);
    auto f = [&](double a) {
        return trace_norm(rho.matrix() - ((1.0 - a) * p + (a / 4.0) * id));
    };
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-6) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    out.alpha_star = 0.5 * (lo + hi);
    out.d_subspace = f(out.alpha_star);
    // endpoints can win within the search tolerance
    const double f0 = f(0.0), fe = f(1.0);
    if (f0 < out.d_subspace) {
        out.d_subspace = f0;
        out.alpha_star = 0.0;
    }
    if (fe < out.d_subspace) {
        out.d_subspace = fe;
        out.alpha_star = 1.0;
    }
    return out;
}

DistanceSet distance_set(const DensityMatrix& rho, const CoveringPair& coverings) {
    DistanceSet out = distance_set(rho);
    DensityMatrix r1 = partial_trace(coverings.psi1, rho.sites());
    out.d_cover = trace_norm(rho.matrix() - r1.matrix());
    if (coverings.psi2) {
        DensityMatrix r2 = partial_trace(*coverings.psi2, rho.sites());
        out.d_cover = std::min(out.d_cover, trace_norm(rho.matrix() - r2.matrix()));
    }
    return out;
}

double von_neumann_entropy_bits(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix(), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()[i];
        if (lam > 0.0) s -= lam * std::log2(lam);
    }
    return s;
}

EntanglementMap entanglement_map(const PureState& state) {
    const int n = state.n_sites();
    EntanglementMap map;
    map.raw = Eigen::MatrixXd::Zero(n, n);

    std::vector<double> single(n);
    for (int i = 0; i < n; ++i) {
        const int keep[] = {i};
        single[i] = von_neumann_entropy_bits(partial_trace(state, keep));
        map.raw(i, i) = 1.0 - single[i];
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const int keep[] = {i, j};
            const double s_ij = von_neumann_entropy_bits(partial_trace(state, keep));
            map.raw(i, j) = map.raw(j, i) = single[i] + single[j] - s_ij;
        }
    }
    const double max = map.raw.maxCoeff();
    map.normalized = max > 0.0 ? Eigen::MatrixXd(map.raw / max) : map.raw;
    return map;
}

double loschmidt_echo(const EigenSystem& eig, const PureState& initial, double t) {
    if (eig.vectors.rows() != initial.amplitudes().size())
        throw DomainError("loschmidt_echo: eigensystem/state dimension mismatch");
    const Eigen::VectorXcd c = eig.vectors.transpose() * initial.amplitudes();
    const double missing = std::max(0.0, 1.0 - c.squaredNorm());
    if (std::sqrt(missing) > 1e-8)
        throw CapacityError("loschmidt_echo: initial state not supported by the "
                            "provided eigenbasis (residual " +
                            std::to_string(std::sqrt(missing)) + ")");
    std::complex<double> z = 0.0;
    for (Eigen::Index n = 0; n < c.size(); ++n)
        z += std::norm(c[n]) * std::exp(std::complex<double>(0.0, -eig.energies[n] * t));
    const double le = std::norm(z);
    return std::clamp(le, 0.0, 1.0);
}

double singlet_overlap(const DensityMatrix& rho, const DensityMatrix& reference) {
    if (rho.sites() != reference.sites())
        throw DomainError("singlet_overlap: density matrices live on different sites");
    return (rho.matrix() * reference.matrix()).trace().real();
}

} // namespace mgchain
