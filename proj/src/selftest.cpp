#include <cmath>
#include <complex>
#include <ostream>
#include <random>
#include <string>

#include "mgchain/commands.hpp"
#include "mgchain/dynamics.hpp"
#include "mgchain/observables.hpp"
#include "mgchain/sweep.hpp"

namespace mgchain {

namespace {

struct Reporter {
    std::ostream& os;
    int failures = 0;

    void check(const std::string& name, bool ok, const std::string& detail = "") {
        os << (ok ? "PASS" : "FAIL") << " selftest." << name;
        if (!ok && !detail.empty()) os << "  (" << detail << ")";
        os << "\n";
        if (!ok) ++failures;
    }

    template <class Fn>
    void guarded(const std::string& name, Fn fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            check(name, false, e.what());
        }
    }
};

Eigen::VectorXcd random_state(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> gauss;
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = {gauss(rng), gauss(rng)};
    v.normalize();
    return v;
}

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXcd r(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) r(i, j) = {gauss(rng), gauss(rng)};
    return 0.5 * (r + r.adjoint());
}

} // namespace

int run_selftest(std::ostream& os, std::uint64_t seed) {
    Reporter rep{os};
    std::mt19937_64 rng(seed);

    rep.guarded("polarization_conserved", [&] {
        rep.check("polarization_conserved",
                  commutes_with_polarization({8, 0.5, Boundary::periodic, 0.7, 3}));
    });

    rep.guarded("two_spin_spectrum", [&] {
        const Sector sec(2, 0);
        const auto sys = dense_eig(build_hamiltonian({2, 0.0, Boundary::open, 0.0, 0}, sec));
        rep.check("two_spin_spectrum", std::abs(sys.energies[0] + 0.75) < 1e-12 &&
                                           std::abs(sys.energies[1] - 0.25) < 1e-12);
    });

    rep.guarded("mg_ground_state", [&] {
        // at J2 = 1/2 the open-chain ground state is the exact dimer covering
        auto sec = std::make_shared<Sector>(8, 0);
        const auto sys = dense_eig(build_hamiltonian({8, 0.5, Boundary::open, 0.0, 0}, *sec));
        const CoveringPair cov = mg_covering_states(8, Boundary::open);
        const std::complex<double> ov =
            cov.psi1.amplitudes().adjoint() * sys.vectors.col(0).cast<std::complex<double>>();
        rep.check("mg_ground_state",
                  std::abs(sys.energies[0] + 3.0) < 1e-10 && std::abs(ov) > 1.0 - 1e-8);
    });

    rep.guarded("lanczos_matches_dense", [&] {
        const Sector sec(10, 0);
        const auto op = build_hamiltonian({10, 0.3, Boundary::periodic, 0.9, 2}, sec);
        LanczosOptions opts;
        opts.seed = seed;
        const auto lz = lanczos_extremal(op, 3, opts);
        const auto dn = dense_eig(op);
        double diff = 0.0;
        for (int i = 0; i < 3; ++i) diff = std::max(diff, std::abs(lz.energies[i] - dn.energies[i]));
        rep.check("lanczos_matches_dense", diff < 1e-9, "max energy diff " + format_double(diff));
    });

    rep.guarded("entropy_symmetric", [&] {
        auto sec = std::make_shared<Sector>(8, 0);
        const PureState psi(sec, random_state(rng, static_cast<Eigen::Index>(sec->dim())));
        const double sa = von_neumann_entropy_bits(partial_trace(psi, std::vector<int>{0, 1, 2, 3}));
        const double sb = von_neumann_entropy_bits(partial_trace(psi, std::vector<int>{4, 5, 6, 7}));
        rep.check("entropy_symmetric", std::abs(sa - sb) < 1e-8,
                  "S(A)=" + format_double(sa) + " S(B)=" + format_double(sb));
    });

    rep.guarded("evolution_unitary", [&] {
        auto sec = std::make_shared<Sector>(8, 0);
        const auto op = build_hamiltonian({8, 0.5, Boundary::open, 2.0, 2}, *sec);
        const auto sys = dense_eig(op);
        const PureState psi0(sec, random_state(rng, static_cast<Eigen::Index>(sec->dim())));
        const Eigen::VectorXcd h_psi0 =
            op.to_dense().cast<std::complex<double>>() * psi0.amplitudes();
        const double e_init = (psi0.amplitudes().adjoint() * h_psi0)[0].real();
        bool ok = true;
        for (double t : {0.7, 13.9, 250.1}) {
            const PureState psit = evolve(sys, psi0, t);
            const Eigen::VectorXcd h_psit =
                op.to_dense().cast<std::complex<double>>() * psit.amplitudes();
            const double e_t = (psit.amplitudes().adjoint() * h_psit)[0].real();
            ok = ok && std::abs(psit.amplitudes().norm() - 1.0) < 1e-9 &&
                 std::abs(e_t - e_init) < 1e-9;
        }
        rep.check("evolution_unitary", ok);
    });

    rep.guarded("loschmidt_echo_bounds", [&] {
        auto sec = std::make_shared<Sector>(8, 0);
        const auto sys = dense_eig(build_hamiltonian({8, 0.5, Boundary::open, 2.0, 2}, *sec));
        const PureState psi0(sec, random_state(rng, static_cast<Eigen::Index>(sec->dim())));
        bool ok = std::abs(loschmidt_echo(sys, psi0, 0.0) - 1.0) < 1e-10;
        for (double t = 0.5; t < 40.0; t += 3.7) {
            const double le = loschmidt_echo(sys, psi0, t);
            ok = ok && le >= 0.0 && le <= 1.0;
        }
        rep.check("loschmidt_echo_bounds", ok);
    });

    rep.guarded("trace_norm_metric", [&] {
        bool ok = true;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            const Eigen::MatrixXcd a = random_hermitian(rng, 4), b = random_hermitian(rng, 4);
            const double tab = trace_norm(a + b), ta = trace_norm(a), tb = trace_norm(b);
            ok = tab <= ta + tb + 1e-10 && ta >= 0.0 &&
                 std::abs(trace_norm(a - b) - trace_norm(b - a)) < 1e-10;
        }
        rep.check("trace_norm_metric", ok);
    });

    return rep.failures;
}

} // namespace mgchain
