#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mgchain/eigensolve.hpp"
#include "mgchain/hamiltonian.hpp"
#include "mgchain/sector.hpp"

namespace mgchain {

using SectorPtr = std::shared_ptr<const Sector>;

// Normalized pure state with support in a single polarization sector (every
// Hamiltonian here conserves L, and the MG reference states live in L=0).
class PureState {
public:
    // Validates ||amp|| = 1 within 1e-8 and renormalizes to machine precision.
    PureState(SectorPtr sector, Eigen::VectorXcd amp);
    PureState(SectorPtr sector, const Eigen::VectorXd& amp);

    const Sector& sector() const { return *sector_; }
    const SectorPtr& sector_ptr() const { return sector_; }
    const Eigen::VectorXcd& amplitudes() const { return amp_; }
    int n_sites() const { return sector_->n_sites(); }

private:
    SectorPtr sector_;
    Eigen::VectorXcd amp_;
};

// Reduced density matrix on an ordered subsystem.  sites are ascending chain
// positions; site sites[i] maps to bit i of the row/column index (bit set =
// spin up), matching the BasisState convention.
class DensityMatrix {
public:
    // Validates Hermiticity and unit trace to 1e-12 and positive
    // semidefiniteness to -1e-10.
    DensityMatrix(std::vector<int> sites, Eigen::MatrixXcd m);

    const std::vector<int>& sites() const { return sites_; }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    std::vector<int> sites_;
    Eigen::MatrixXcd m_;
};

// The two nearest-neighbor singlet coverings of an even chain.  psi1 pairs
// (0,1),(2,3),...; psi2 (periodic only) pairs (1,2),(3,4),...,(N-1,0), the
// wrap pair carrying site N-1 as its first arrow.  Each singlet pair (a,b)
// reads (|up_a down_b> - |down_a up_b>)/sqrt(2).
struct CoveringPair {
    PureState psi1;
    std::optional<PureState> psi2;
    double overlap = 0.0; // <psi1|psi2>, real; 0 for open chains
};

// Throws DomainError for odd N.
CoveringPair mg_covering_states(int n_sites, Boundary boundary);

// Basis product state |bits> as a PureState of the matching sector.
PureState basis_product_state(SectorPtr sector, BasisState bits);

// Precomputed grouping of a sector basis by environment configuration, for
// repeated reductions onto one subsystem (time-series sampling, dephasing
// sums).  Within a bucket all basis states share their environment bits.
class ReductionPlan {
public:
    ReductionPlan(const Sector& sec, std::span<const int> keep);

    Eigen::Index sub_dim() const { return sub_dim_; }

    // acc += Tr_env |amp><amp|; amp need not be normalized.
    void accumulate(const Eigen::VectorXcd& amp, Eigen::MatrixXcd& acc) const;
    void accumulate_real(const Eigen::VectorXd& amp, Eigen::MatrixXd& acc) const;
    Eigen::MatrixXcd reduce(const Eigen::VectorXcd& amp) const;

private:
    Eigen::Index sub_dim_ = 0;
    std::vector<std::int64_t> bucket_begin_; // n_buckets+1 offsets into entries_
    std::vector<std::pair<std::int32_t, std::int32_t>> entries_; // (rank, sub index)
};

// Reduced density matrix on keep_sites (distinct, 0-based).  Subsystems are
// capped at 14 sites (the matrix is dense 2^k x 2^k).
DensityMatrix partial_trace(const PureState& state, std::span<const int> keep_sites);
// Further reduction of an existing density matrix; keep_sites must be a
// subset of rho.sites().
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep_sites);

// Reduction of the dephased long-time average: coherences between
// non-degenerate eigenstates are dropped (blocks per degenerate_groups), and
// each block's contribution is reduced to keep_sites directly so the full
// 2^N density matrix is never formed.  Requires a full eigensystem.
DensityMatrix time_averaged_state(const EigenSystem& eig, const PureState& initial,
                                  std::span<const int> keep_sites);

} // namespace mgchain
