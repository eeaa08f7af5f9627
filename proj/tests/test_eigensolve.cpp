#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracle.hpp"

#include "mgchain/eigensolve.hpp"
#include "mgchain/errors.hpp"

using namespace mgchain;

TEST_CASE("dense solver on closed-form systems") {
    SUBCASE("two-spin L=0 sector") {
        const Sector sec(2, 0);
        const auto sys = dense_eig(build_hamiltonian({2, 0.0, Boundary::open, 0.0, 0}, sec));
        CHECK(sys.full);
        CHECK(sys.energies[0] == doctest::Approx(-0.75).epsilon(1e-14));
        CHECK(sys.energies[1] == doctest::Approx(0.25).epsilon(1e-14));
    }

    SUBCASE("pure-field operator is diagonal, eigenvectors are basis states") {
        const Sector sec(4, 0);
        const std::vector<double> w = {3.0, -1.0, 0.5, 2.0};
        const auto op = build_operator({}, w, sec);
        CHECK(op.n_offdiag() == 0);
        const auto sys = dense_eig(op);
        Eigen::VectorXd diag = op.diagonal();
        std::sort(diag.data(), diag.data() + diag.size());
        for (Eigen::Index i = 0; i < diag.size(); ++i)
            CHECK(sys.energies[i] == doctest::Approx(diag[i]).epsilon(1e-14));
        // each eigenvector is a coordinate vector
        for (Eigen::Index c = 0; c < sys.vectors.cols(); ++c)
            CHECK(sys.vectors.col(c).cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("open dimer point has the exact covering energy") {
        const Sector sec(8, 0);
        const auto sys = dense_eig(build_hamiltonian({8, 0.5, Boundary::open, 0.0, 0}, sec));
        CHECK(sys.energies[0] == doctest::Approx(-3.0).epsilon(1e-12));
        // cross-check against the product-space oracle
        const double e_oracle = oracle::ground_energy(oracle::full_hamiltonian(8, 0.5, false, 0.0, 0));
        CHECK(sys.energies[0] == doctest::Approx(e_oracle).epsilon(1e-12));
    }

    SUBCASE("capacity guard") {
        const Sector sec(10, 0); // dim 252
        const auto op = build_hamiltonian({10, 0.0, Boundary::open, 0.0, 0}, sec);
        CHECK_THROWS_AS(dense_eig(op, 100), CapacityError);
    }
}

TEST_CASE("degenerate_groups clusters within tolerance") {
    Eigen::VectorXd e(5);
    e << -1.0, -1.0 + 1e-12, -0.5, 2.0, 2.0;
    const auto groups = degenerate_groups(e);
    REQUIRE(groups.size() == 3);
    CHECK(groups[0].first == 0);
    CHECK(groups[0].second == 2);
    CHECK(groups[1].first == 2);
    CHECK(groups[1].second == 3);
    CHECK(groups[2].second == 5);
}

TEST_CASE("lanczos agrees with dense diagonalization") {
    SUBCASE("all sectors of a field-split chain") {
        for (int tl : Sector::all_twice_l(10)) {
            const Sector sec(10, tl);
            const auto op = build_hamiltonian({10, 0.5, Boundary::periodic, 1.0, 3}, sec);
            const int k = std::min<int>(3, static_cast<int>(sec.dim()));
            LanczosOptions opts;
            const auto lz = lanczos_extremal(op, k, opts);
            const auto dn = dense_eig(op);
            for (int i = 0; i < k; ++i)
                CHECK(std::abs(lz.energies[i] - dn.energies[i]) < 1e-9);
        }
    }

    SUBCASE("randomized couplings") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> uj(0.0, 0.8), uh(0.0, 3.0);
        for (int trial = 0; trial < 4; ++trial) {
            const Sector sec(11, -1);
            const auto op = build_hamiltonian(
                {11, uj(rng), trial % 2 ? Boundary::periodic : Boundary::open, uh(rng), 3}, sec);
            LanczosOptions opts;
            opts.seed = 1000 + trial;
            const auto lz = lanczos_extremal(op, 2, opts);
            const auto dn = dense_eig(op);
            CHECK(std::abs(lz.energies[0] - dn.energies[0]) < 1e-9);
            CHECK(std::abs(lz.energies[1] - dn.energies[1]) < 1e-9);
            // eigenvector quality via residual
            const Eigen::VectorXd r =
                op.apply(lz.vectors.col(0)) - lz.energies[0] * lz.vectors.col(0);
            CHECK(r.norm() < 1e-8 * (1.0 + std::abs(lz.energies[0])));
        }
    }

    SUBCASE("resolves an exactly degenerate ground pair") {
        // periodic dimer point: two covering states share the lowest energy
        const Sector sec(8, 0);
        const auto op = build_hamiltonian({8, 0.5, Boundary::periodic, 0.0, 0}, sec);
        LanczosOptions opts;
        const auto lz = lanczos_extremal(op, 3, opts);
        const auto dn = dense_eig(op);
        CHECK(std::abs(lz.energies[0] - dn.energies[0]) < 1e-9);
        CHECK(std::abs(lz.energies[1] - dn.energies[1]) < 1e-9);
        CHECK(std::abs(lz.energies[0] - lz.energies[1]) < degeneracy_tol(lz.energies[0]));
        // the two degenerate vectors must be orthonormal
        CHECK(std::abs(lz.vectors.col(0).dot(lz.vectors.col(1))) < 1e-8);
        CHECK(lz.vectors.col(0).norm() == doctest::Approx(1.0).epsilon(1e-10));
    }

    SUBCASE("deterministic for a fixed seed") {
        const Sector sec(10, 2);
        const auto op = build_hamiltonian({10, 0.3, Boundary::periodic, 0.4, 2}, sec);
        LanczosOptions opts;
        opts.seed = 777;
        const auto a = lanczos_extremal(op, 2, opts);
        const auto b = lanczos_extremal(op, 2, opts);
        // bitwise reproducible
        CHECK((a.energies - b.energies).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
        LanczosOptions opts2;
        opts2.seed = 778;
        const auto c = lanczos_extremal(op, 2, opts2);
        CHECK(std::abs(a.energies[0] - c.energies[0]) < 1e-9);
    }

    SUBCASE("warm start reproduces the cold answer") {
        const Sector sec(12, 0);
        const auto op1 = build_hamiltonian({12, 0.5, Boundary::periodic, 1.0, 4}, sec);
        const auto op2 = build_hamiltonian({12, 0.5, Boundary::periodic, 1.05, 4}, sec);
        LanczosOptions opts;
        const auto cold1 = lanczos_extremal(op1, 2, opts);
        const Eigen::VectorXd warm = cold1.vectors.col(0);
        LanczosOptions wopts;
        wopts.warm_start = &warm;
        const auto warm2 = lanczos_extremal(op2, 2, wopts);
        const auto cold2 = lanczos_extremal(op2, 2, opts);
        CHECK(std::abs(warm2.energies[0] - cold2.energies[0]) < 1e-9);
        CHECK(std::abs(warm2.energies[1] - cold2.energies[1]) < 1e-9);
    }

    SUBCASE("failure reports a solver error") {
        const Sector sec(10, 0);
        const auto op = build_hamiltonian({10, 0.5, Boundary::open, 0.0, 0}, sec);
        LanczosOptions opts;
        opts.max_cycles = 0;
        CHECK_THROWS_AS(lanczos_extremal(op, 1, opts), SolverError);
    }

    SUBCASE("one-dimensional sector") {
        const Sector sec(4, 4);
        const auto op = build_hamiltonian({4, 0.5, Boundary::periodic, 0.0, 0}, sec);
        const auto sys = lowest_pairs(op, 1);
        // fully polarized ring: 4 NN bonds at 1/4 plus two merged NNN bonds at 2*j2/4
        CHECK(sys.energies[0] == doctest::Approx(1.0 + 0.5).epsilon(1e-14));
    }
}

TEST_CASE("global ground location across sectors") {
    SUBCASE("strong field pins the fully polarized sector") {
        const ChainSpec spec{4, 0.5, Boundary::periodic, 100.0, 4};
        const auto rep = global_ground(spec, Sector::all_twice_l(4));
        CHECK(rep.global().twice_l == -4);
        CHECK(rep.global().energy == doctest::Approx(-198.5).epsilon(1e-12));
        CHECK(rep.global_unique);
    }

    SUBCASE("open dimer ground is unique, periodic is a doublet") {
        const ChainSpec open_spec{8, 0.5, Boundary::open, 0.0, 0};
        const auto open_rep = global_ground(open_spec, Sector::all_twice_l(8));
        CHECK(open_rep.global().twice_l == 0);
        CHECK(open_rep.global_unique);

        const ChainSpec per_spec{8, 0.5, Boundary::periodic, 0.0, 0};
        const auto per_rep = global_ground(per_spec, Sector::all_twice_l(8));
        CHECK(per_rep.global().twice_l == 0);
        CHECK_FALSE(per_rep.global_unique);
        // the doublet lives inside L=0, so the sector appears twice
        int count = 0;
        for (int tl : per_rep.tied_twice_l)
            if (tl == 0) ++count;
        CHECK(count == 2);
    }

    SUBCASE("global energy is non-increasing in the field strength") {
        double prev = std::numeric_limits<double>::infinity();
        for (double h : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            const ChainSpec spec{6, 0.5, Boundary::periodic, h, 2};
            const auto rep = global_ground(spec, Sector::all_twice_l(6));
            CHECK(rep.global().energy <= prev + 1e-12);
            prev = rep.global().energy;
        }
    }
}

TEST_CASE("spectral gap over the union of sector spectra") {
    SUBCASE("two spins") {
        const auto rep = spectral_gap({2, 0.0, Boundary::open, 0.0, 0});
        REQUIRE(rep.gap.has_value());
        CHECK(*rep.gap == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.global().energy == doctest::Approx(-0.75).epsilon(1e-12));
    }

    SUBCASE("matches the distinct-level oracle gap") {
        for (const bool periodic : {false, true}) {
            const auto full = oracle::full_hamiltonian(6, 0.5, periodic, 0.0, 0);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full);
            const Eigen::VectorXd& ev = es.eigenvalues();
            double second = ev[ev.size() - 1];
            for (Eigen::Index i = 1; i < ev.size(); ++i)
                if (ev[i] - ev[0] > degeneracy_tol(ev[0])) {
                    second = ev[i];
                    break;
                }
            const auto rep =
                spectral_gap({6, 0.5, periodic ? Boundary::periodic : Boundary::open, 0.0, 0});
            REQUIRE(rep.gap.has_value());
            CHECK(*rep.gap == doctest::Approx(second - ev[0]).epsilon(1e-10));
        }
    }

    SUBCASE("degenerate dimer doublet collapses to one level") {
        // periodic N=8 at the dimer point: gap must skip the degenerate twin
        const auto rep = spectral_gap({8, 0.5, Boundary::periodic, 0.0, 0});
        REQUIRE(rep.gap.has_value());
        CHECK(*rep.gap > 1e-6);
        CHECK_FALSE(rep.global_unique);
    }
}
