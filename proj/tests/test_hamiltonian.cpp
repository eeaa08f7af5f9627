#include <doctest.h>

#include <bit>
#include <memory>

#include "mgchain/errors.hpp"
#include "mgchain/hamiltonian.hpp"
#include "oracle.hpp"

using namespace mgchain;

namespace {

// Collects the library's sector blocks into a full-space matrix for direct
// comparison with the brute-force oracle.
Eigen::MatrixXd assemble_full(const ChainSpec& spec) {
    const long dim = 1L << spec.n_sites;
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(dim, dim);
    for (int t : Sector::all_twice_l(spec.n_sites)) {
        Sector sec(spec.n_sites, t);
        Eigen::MatrixXd block = build_hamiltonian(spec, sec).to_dense();
        for (std::size_t i = 0; i < sec.dim(); ++i)
            for (std::size_t j = 0; j < sec.dim(); ++j)
                full(static_cast<long>(sec.state(i)), static_cast<long>(sec.state(j))) =
                    block(static_cast<long>(i), static_cast<long>(j));
    }
    return full;
}

} // namespace

TEST_CASE("bond lists follow the chain geometry") {
    SUBCASE("open N=6 with J2") {
        auto bonds = heisenberg_bonds(6, 0.5, Boundary::open);
        CHECK(bonds.size() == 5 + 4);
        for (const auto& b : bonds) {
            CHECK(b.a < b.b);
            CHECK(b.coupling == (b.b - b.a == 1 ? 1.0 : 0.5));
        }
    }
    SUBCASE("periodic N=6 adds wrap bonds") {
        auto bonds = heisenberg_bonds(6, 0.5, Boundary::periodic);
        CHECK(bonds.size() == 6 + 6);
    }
    SUBCASE("J2=0 omits next-nearest bonds") {
        CHECK(heisenberg_bonds(8, 0.0, Boundary::periodic).size() == 8);
    }
    SUBCASE("tiny rings merge duplicate bonds") {
        // N=2 periodic: (0,1) from j=0 and wrap (1,0) merge into coupling 2.
        auto b2 = heisenberg_bonds(2, 0.0, Boundary::periodic);
        REQUIRE(b2.size() == 1);
        CHECK(b2[0].coupling == 2.0);
        // N=4 periodic NNN: each pair appears twice -> coupling 2*j2.
        auto b4 = heisenberg_bonds(4, 0.5, Boundary::periodic);
        int nnn = 0;
        for (const auto& b : b4)
            if (b.b - b.a == 2) {
                ++nnn;
                CHECK(b.coupling == doctest::Approx(1.0));
            }
        CHECK(nnn == 2);
    }
}

TEST_CASE("two-spin spectrum is singlet/triplet") {
    ChainSpec spec{.n_sites = 2};
    Sector s0(2, 0);
    auto h0 = build_hamiltonian(spec, s0).to_dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h0);
    CHECK(es.eigenvalues()[0] == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(es.eigenvalues()[1] == doctest::Approx(0.25).epsilon(1e-12));
    for (int t : {-2, 2}) {
        Sector sec(2, t);
        auto h = build_hamiltonian(spec, sec).to_dense();
        CHECK(h(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("Majumdar-Ghosh N=4 open ground: energy -1.5, dimer product vector") {
    ChainSpec spec{.n_sites = 4, .j2 = 0.5};
    Sector sec(4, 0);
    auto op = build_hamiltonian(spec, sec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.to_dense());
    CHECK(es.eigenvalues()[0] == doctest::Approx(-1.5).epsilon(1e-12));

    // oracle cross-check on the full space
    auto full = oracle::full_hamiltonian(4, 0.5, false, 0.0, 0);
    CHECK(oracle::ground_energy(full) == doctest::Approx(-1.5).epsilon(1e-12));

    // ground vector = singlet(0,1) x singlet(2,3): amplitude +1/2 on states
    // with pattern (down,up) on a pair contributing -, etc.
    Eigen::VectorXd v = es.eigenvectors().col(0);
    // construct expected vector in the sector basis
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(static_cast<long>(sec.dim()));
    for (int b01 : {0, 1}) {
        for (int b23 : {0, 1}) {
            // pair (a,b): + for up_a down_b (bit a set), - for down_a up_b
            BasisState s = 0;
            double amp = 0.5;
            if (b01 == 0) s |= 1u << 0; else { s |= 1u << 1; amp = -amp; }
            if (b23 == 0) s |= 1u << 2; else { s |= 1u << 3; amp = -amp; }
            expect[static_cast<long>(sec.rank(s))] = amp;
        }
    }
    double overlap = std::abs(v.dot(expect));
    CHECK(overlap == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("field sign convention: aligned all-down state has energy shift -N'*h/2") {
    // N=4, h=100 on all four sites: sector L=-2 is the single all-down state
    // with field energy -2h on top of the exchange diagonal.
    ChainSpec spec{.n_sites = 4, .j2 = 0.5, .boundary = Boundary::periodic, .h = 100.0, .n_field = 4};
    Sector sec(4, -4);
    auto op = build_hamiltonian(spec, sec);
    REQUIRE(op.dim() == 1);
    // exchange diagonal of all-down: NN 4 bonds * 1/4 + NNN (2 merged bonds of
    // coupling 1) * 1/4 = 1 + 0.5; field: -2h
    CHECK(op.diagonal()[0] == doctest::Approx(1.5 - 200.0).epsilon(1e-12));
}

TEST_CASE("library blocks equal the brute-force full-space Hamiltonian") {
    for (bool periodic : {false, true}) {
        for (double j2 : {0.0, 0.37}) {
            ChainSpec spec{.n_sites = 5,
                           .j2 = j2,
                           .boundary = periodic ? Boundary::periodic : Boundary::open,
                           .h = 0.8,
                           .n_field = 2};
            Eigen::MatrixXd lib = assemble_full(spec);
            Eigen::MatrixXd ref = oracle::full_hamiltonian(5, j2, periodic, 0.8, 2);
            CHECK((lib - ref).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
}

TEST_CASE("assembled operators are exactly symmetric") {
    ChainSpec spec{.n_sites = 8, .j2 = 0.5, .boundary = Boundary::periodic, .h = 2.0, .n_field = 3};
    for (int t : {0, 2, -4}) {
        Sector sec(8, t);
        auto m = build_hamiltonian(spec, sec).to_dense();
        CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("field changes only the diagonal") {
    ChainSpec base{.n_sites = 6, .j2 = 0.5, .boundary = Boundary::open};
    ChainSpec with_field = base;
    with_field.h = 1.7;
    with_field.n_field = 3;
    Sector sec(6, 0);
    auto m0 = build_hamiltonian(base, sec).to_dense();
    auto m1 = build_hamiltonian(with_field, sec).to_dense();
    Eigen::MatrixXd diff = m1 - m0;
    CHECK((diff - Eigen::MatrixXd(diff.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spin-flip symmetry at h=0: sectors L and -L share spectra") {
    ChainSpec spec{.n_sites = 6, .j2 = 0.5, .boundary = Boundary::periodic};
    for (int t : {2, 4}) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> plus(
            build_hamiltonian(spec, Sector(6, t)).to_dense(), Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> minus(
            build_hamiltonian(spec, Sector(6, -t)).to_dense(), Eigen::EigenvaluesOnly);
        CHECK((plus.eigenvalues() - minus.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("polarization conservation test hook") {
    CHECK(commutes_with_polarization({.n_sites = 6, .j2 = 0.5, .boundary = Boundary::periodic, .h = 2.0, .n_field = 3}));
    CHECK(commutes_with_polarization({.n_sites = 5, .j2 = 0.3, .boundary = Boundary::open, .h = 0.7, .n_field = 2}));
    CHECK(commutes_with_polarization({.n_sites = 8, .j2 = 0.0, .boundary = Boundary::open}));
}

TEST_CASE("spec validation") {
    Sector sec(4, 0);
    CHECK_THROWS_AS(build_hamiltonian({.n_sites = 6}, sec), DomainError);
    CHECK_THROWS_AS(build_hamiltonian({.n_sites = 4, .n_field = 5}, sec), DomainError);
    CHECK_THROWS_AS(heisenberg_bonds(1, 0.0, Boundary::open), DomainError);
    std::vector<Bond> bad = {{0, 4, 1.0}};
    CHECK_THROWS_AS(build_operator(bad, {}, sec), DomainError);
}
