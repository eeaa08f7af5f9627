#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mgchain/hamiltonian.hpp"

namespace mgchain {

// Eigenpairs of a sector Hamiltonian, ascending in energy.  `full` marks a
// complete decomposition (vector count == dimension).
struct EigenSystem {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors; // dim x n_pairs, orthonormal columns
    bool full = false;

    Eigen::Index n_pairs() const { return energies.size(); }
};

struct LanczosOptions {
    std::uint64_t seed = 1234567;
    int max_cycles = 400;
    int cycle_length = 250;      // Krylov vectors kept per restart cycle
    double tol = 1e-10;          // residual target, relative to spectral scale
    // Optional warm start; must have the sector dimension.
    const Eigen::VectorXd* warm_start = nullptr;
};

// Levels closer than this are treated as degenerate (ties, dephasing blocks).
inline double degeneracy_tol(double e0) { return 1e-10 * (1.0 + std::abs(e0)); }

// Groups ascending energies into runs of mutually degenerate levels; returns
// [begin, end) index pairs.  Uses degeneracy_tol of the lowest energy.
std::vector<std::pair<Eigen::Index, Eigen::Index>>
degenerate_groups(const Eigen::VectorXd& energies);

// Full dense decomposition.  Throws CapacityError when dim > dense_threshold.
EigenSystem dense_eig(const SparseOperator& op, std::size_t dense_threshold = 16384);

// Lowest k eigenpairs by restarted Lanczos with full reorthogonalization and
// one-by-one deflation (resolves exact degeneracies).  Deterministic for a
// given seed.  Falls back to a dense solve for very small dimensions, where a
// Krylov iteration cannot even span the space.
EigenSystem lanczos_extremal(const SparseOperator& op, int k, const LanczosOptions& opts = {});

// Lowest k pairs via whichever solver suits the dimension (dense below 512).
EigenSystem lowest_pairs(const SparseOperator& op, int k, std::size_t dense_threshold = 16384,
                         const LanczosOptions& opts = {});

struct SectorGround {
    int twice_l;
    double energy;
    Eigen::VectorXd vector;
};

struct GroundReport {
    std::vector<SectorGround> per_sector;   // in the order requested
    int global_index = 0;                   // index into per_sector
    // Sectors whose ground energies tie with the global minimum (within the
    // degeneracy tolerance), including the winner.  A within-sector ground
    // degeneracy also registers as a tie.
    std::vector<int> tied_twice_l;
    bool global_unique = true;
    std::optional<double> gap;              // set by spectral_gap

    const SectorGround& global() const { return per_sector[global_index]; }
};

// Ground state per sector plus the argmin sector.  check_internal_degeneracy
// additionally solves k=2 per sector so within-sector ground degeneracies are
// reported as ties.
GroundReport global_ground(const ChainSpec& spec, std::span<const int> twice_l_list,
                           const LanczosOptions& opts = {},
                           std::size_t dense_threshold = 16384,
                           bool check_internal_degeneracy = true);

// Difference between the two lowest *distinct* energies of the union of all
// sector spectra (levels within degeneracy_tol collapse to one).  At h=0 the
// L and -L sectors are mirror images, so only L >= 0 is solved.
GroundReport spectral_gap(const ChainSpec& spec, const LanczosOptions& opts = {},
                          std::size_t dense_threshold = 16384);

} // namespace mgchain
