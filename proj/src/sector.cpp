#include "mgchain/sector.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <string>

#include "mgchain/errors.hpp"

namespace mgchain {

namespace {

const std::array<std::array<std::uint64_t, 64>, 64>& pascal_table() {
    static const auto table = [] {
        std::array<std::array<std::uint64_t, 64>, 64> t{};
        for (int n = 0; n < 64; ++n) {
            t[n][0] = 1;
            for (int k = 1; k <= n; ++k)
                t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
        }
        return t;
    }();
    return table;
}

} // namespace

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n || n < 0 || n > 63) return 0;
    return pascal_table()[n][k];
}

Sector::Sector(int n_sites, int twice_l) : n_sites_(n_sites), twice_l_(twice_l) {
    if (n_sites < 1 || n_sites > kMaxSites)
        throw DomainError("sector: n_sites=" + std::to_string(n_sites) +
                          " outside supported range [1," + std::to_string(kMaxSites) + "]");
    if ((n_sites + twice_l) % 2 != 0 || twice_l < -n_sites || twice_l > n_sites)
        throw DomainError("sector: polarization 2L=" + std::to_string(twice_l) +
                          " incompatible with n_sites=" + std::to_string(n_sites));
    n_up_ = (n_sites + twice_l) / 2;

    states_.reserve(binomial(n_sites, n_up_));
    if (n_up_ == 0) {
        states_.push_back(0);
    } else {
        // Gosper's hack: next larger integer with the same popcount.
        const BasisState limit = BasisState{1} << n_sites;
        BasisState s = (BasisState{1} << n_up_) - 1;
        while (s < limit) {
            states_.push_back(s);
            BasisState c = s & -s;
            BasisState r = s + c;
            s = (((r ^ s) >> 2) / c) | r;
        }
    }
}

bool Sector::contains(BasisState s) const {
    return s < (BasisState{1} << n_sites_) && std::popcount(s) == n_up_;
}

std::size_t Sector::rank(BasisState s) const {
    if (!contains(s))
        throw DomainError("sector: state " + std::to_string(s) + " not in sector (N=" +
                          std::to_string(n_sites_) + ", 2L=" + std::to_string(twice_l_) + ")");
    // Combinatorial number system: with set bit positions p_1 < ... < p_k the
    // rank in ascending-bitmask order is sum_i C(p_i, i).
    std::size_t r = 0;
    int i = 0;
    BasisState rest = s;
    while (rest) {
        int p = std::countr_zero(rest);
        rest &= rest - 1;
        ++i;
        r += binomial(p, i);
    }
    return r;
}

std::vector<int> Sector::all_twice_l(int n_sites) {
    if (n_sites < 1 || n_sites > kMaxSites)
        throw DomainError("sector: n_sites=" + std::to_string(n_sites) + " outside supported range");
    std::vector<int> out;
    for (int t = -n_sites; t <= n_sites; t += 2) out.push_back(t);
    return out;
}

int Sector::twice_l_from_double(int n_sites, double l) {
    double doubled = 2.0 * l;
    double rounded = std::round(doubled);
    if (std::abs(doubled - rounded) > 1e-9)
        throw DomainError("sector: polarization L=" + std::to_string(l) +
                          " is not an integer or half-integer");
    int twice_l = static_cast<int>(rounded);
    if ((n_sites + twice_l) % 2 != 0 || twice_l < -n_sites || twice_l > n_sites)
        throw DomainError("sector: polarization L=" + std::to_string(l) +
                          " incompatible with n_sites=" + std::to_string(n_sites));
    return twice_l;
}

} // namespace mgchain
