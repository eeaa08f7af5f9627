#include <doctest.h>

#include <bit>
#include <set>

#include "mgchain/errors.hpp"
#include "mgchain/sector.hpp"

using namespace mgchain;

TEST_CASE("sector dimensions match binomial counts") {
    CHECK(Sector(4, 0).dim() == 6);
    CHECK(Sector(4, 4).dim() == 1);       // L=+2: all up, forced
    CHECK(Sector(4, 4).state(0) == 0b1111);
    CHECK(Sector(16, 0).dim() == 12870);
    CHECK(Sector(2, 0).dim() == 2);
    CHECK(Sector(7, -7).dim() == 1);      // all down
    CHECK(Sector(7, -7).state(0) == 0);
}

TEST_CASE("sector membership invariant: popcount - N/2 = L") {
    for (int n : {3, 6}) {
        for (int t : Sector::all_twice_l(n)) {
            Sector sec(n, t);
            for (BasisState s : sec.states())
                CHECK(2 * std::popcount(s) - n == t);
        }
    }
}

TEST_CASE("sectors partition the full space") {
    for (int n : {1, 4, 5, 10}) {
        std::size_t total = 0;
        std::set<BasisState> seen;
        for (int t : Sector::all_twice_l(n)) {
            Sector sec(n, t);
            total += sec.dim();
            seen.insert(sec.states().begin(), sec.states().end());
        }
        CHECK(total == (std::size_t{1} << n));
        CHECK(seen.size() == total);
    }
}

TEST_CASE("basis is ascending and rank/unrank are inverse bijections") {
    SUBCASE("two-site explicit ranks") {
        Sector sec(2, 0);
        CHECK(sec.state(0) == 0b01);
        CHECK(sec.state(1) == 0b10);
        CHECK(sec.rank(0b01) == 0);
        CHECK(sec.rank(0b10) == 1);
    }
    SUBCASE("round trip over sectors (6, L=1) and (7, L=1/2)") {
        for (auto [n, t] : {std::pair{6, 2}, std::pair{7, 1}}) {
            Sector sec(n, t);
            for (std::size_t i = 0; i < sec.dim(); ++i) {
                if (i > 0) CHECK(sec.state(i - 1) < sec.state(i));
                CHECK(sec.rank(sec.state(i)) == i);
            }
        }
    }
}

TEST_CASE("invalid sector parameters raise domain errors naming the pair") {
    CHECK_THROWS_AS(Sector(4, 1), DomainError);   // parity mismatch
    CHECK_THROWS_AS(Sector(4, 6), DomainError);   // |L| > N/2
    CHECK_THROWS_AS(Sector(0, 0), DomainError);
    CHECK_THROWS_WITH_AS(Sector(4, 3), doctest::Contains("n_sites=4"), DomainError);

    Sector sec(4, 0);
    CHECK_THROWS_AS(sec.rank(0b0111), DomainError);  // wrong popcount
    CHECK_THROWS_AS(sec.rank(0b10011), DomainError); // out of range bit
}

TEST_CASE("polarization parsing accepts half-integers only when valid") {
    CHECK(Sector::twice_l_from_double(4, -1.0) == -2);
    CHECK(Sector::twice_l_from_double(7, 0.5) == 1);
    CHECK(Sector::twice_l_from_double(7, -3.5) == -7);
    CHECK_THROWS_AS(Sector::twice_l_from_double(4, 0.5), DomainError);
    CHECK_THROWS_AS(Sector::twice_l_from_double(4, 0.3), DomainError);
    CHECK_THROWS_AS(Sector::twice_l_from_double(4, 3.0), DomainError);
}

TEST_CASE("binomial table") {
    CHECK(binomial(0, 0) == 1);
    CHECK(binomial(16, 8) == 12870);
    CHECK(binomial(20, 10) == 184756);
    CHECK(binomial(5, 6) == 0);
    CHECK(binomial(63, 31) > 0); // top of the table stays in range
}
