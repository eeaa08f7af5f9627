#pragma once

#include <cstdint>
#include <vector>

namespace mgchain {

// Computational basis state of an N-site spin-1/2 chain, stored as a bitmask.
// Bit j set means spin at site j is up; sites are numbered 0..N-1.
using BasisState = std::uint64_t;

// Largest chain the eager sector enumeration supports.
inline constexpr int kMaxSites = 30;

// Binomial coefficient C(n, k) for n <= 63, from a precomputed Pascal table.
// Returns 0 for k < 0 or k > n.
std::uint64_t binomial(int n, int k);

// Fixed total-S^z subspace of the N-site chain.  The polarization quantum
// number L (total S^z) is stored as twice_l = 2*L so half-integer sectors of
// odd chains stay exact integers.  A basis state belongs to the sector iff
// popcount(state) == (n_sites + twice_l) / 2.
//
// Basis states are enumerated eagerly in ascending bitmask order; rank() uses
// the combinatorial number system, so rank(states()[i]) == i.
class Sector {
public:
    // Throws DomainError if n_sites is out of range or twice_l is
    // incompatible with n_sites (wrong parity or |L| > N/2).
    Sector(int n_sites, int twice_l);

    int n_sites() const { return n_sites_; }
    int twice_l() const { return twice_l_; }
    // Number of up spins in every member state.
    int n_up() const { return n_up_; }
    std::size_t dim() const { return states_.size(); }

    const std::vector<BasisState>& states() const { return states_; }
    BasisState state(std::size_t rank) const { return states_[rank]; }

    bool contains(BasisState s) const;
    // Index of `s` within states().  Throws DomainError if `s` is not a
    // member of the sector.
    std::size_t rank(BasisState s) const;

    // All twice_l values valid for an N-site chain, ascending (-N..N step 2).
    static std::vector<int> all_twice_l(int n_sites);

    // Converts a polarization given as a double (e.g. parsed "-1.5") to
    // twice_l, validating that 2*L is an integer.
    static int twice_l_from_double(int n_sites, double l);

private:
    int n_sites_;
    int twice_l_;
    int n_up_;
    std::vector<BasisState> states_;
};

} // namespace mgchain
