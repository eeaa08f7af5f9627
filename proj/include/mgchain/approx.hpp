#pragma once

#include <optional>
#include <vector>

#include "mgchain/eigensolve.hpp"
#include "mgchain/hamiltonian.hpp"
#include "mgchain/states.hpp"

namespace mgchain {

// Strong-field effective model: the n_field spins are frozen fully aligned
// with the field (all down under the +h S^z convention) and the residual
// chain keeps its own J1/J2 bonds, with j_add added on top of the J1 bond
// between the two spins nearest the field.  J2 bonds that would reach into
// the field region are dropped.
struct EffectiveSpec {
    ChainSpec base;     // open boundary, field on sites 0..n_field-1
    double j_add = 0.0;
};

struct EffectiveGround {
    PureState state;        // embedded in the full chain
    int twice_l;            // full-chain sector of the embedded state
    int residual_twice_l;   // sector of the residual-chain ground
    double residual_energy;
    bool residual_tie;      // residual ground degenerate within tolerance
};

// Ground state of the residual chain tensored with the frozen field spins.
// residual_twice_l selects the residual sector; when absent the residual
// chain's own global ground sector is used (at a residual-chain degeneracy
// the embedded overlap depends on this choice, so fits pass it explicitly).
EffectiveGround effective_ground(const EffectiveSpec& spec,
                                 std::optional<int> residual_twice_l = {},
                                 std::size_t dense_threshold = 16384,
                                 const LanczosOptions& opts = {});

struct ApproxReport {
    std::vector<double> j_add_grid;
    std::vector<double> overlaps;    // |<psi0_exact | psi0_app>| per grid point
    double best_j_add = 0.0;
    double best_overlap = 0.0;
    bool boundary_warning = false;   // optimum landed on a grid endpoint
    int exact_twice_l = 0;           // located, not assumed
    bool exact_tie = false;
    double exact_energy = 0.0;
};

// Scans j_add on a uniform grid [lo, hi] with `steps` points, then refines
// the best point by golden-section search to |dj| <= 1e-4.  The residual
// sector is forced to exact_twice_l + n_field so the embedded state lands in
// the exact ground state's sector.
ApproxReport fit_j_add(const ChainSpec& base, double lo = -1.0, double hi = 1.0,
                       int steps = 81, std::size_t dense_threshold = 16384,
                       const LanczosOptions& opts = {});

} // namespace mgchain
