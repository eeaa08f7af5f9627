#pragma once

#include <span>

#include <Eigen/Dense>

#include "mgchain/states.hpp"

namespace mgchain {

// Trace norm ||O||_1 = Tr sqrt(O^dag O) = sum of |eigenvalues| for Hermitian
// O.  Throws DomainError if O deviates from Hermiticity beyond 1e-10.
double trace_norm(const Eigen::MatrixXcd& m);

// <sum_{j in sites} S^z_j> in state `state`; sites are 0-based.
double region_polarization(const PureState& state, std::span<const int> sites);
// Same expectation against a density matrix whose site list covers `sites`.
double region_polarization(const DensityMatrix& rho, std::span<const int> sites);

// Projector onto the two-spin singlet (|ud> - |du>)/sqrt(2) in the 4-dim
// basis ordered per the DensityMatrix bit convention.
Eigen::MatrixXcd singlet_projector();

// Trace distances of a far-pair reduced state from singlet references.
// Prefactor conventions match the exported quantity labels: d_singlet
// carries 1/2, the others none.
struct DistanceSet {
    double d_singlet;   // (1/2) ||rho - P_singlet||_1
    double d_cover;     // min over the two covering reductions of ||rho - r_i||_1
    double d_subspace;  // min_alpha ||rho - ((1-alpha) P_s + alpha/4 I)||_1
    double alpha_star;  // minimizing alpha in [0,1]
};

// rho must be a valid 4x4 (two-site) state; `coverings` must come from the
// same chain geometry as the sites rho lives on.
DistanceSet distance_set(const DensityMatrix& rho, const CoveringPair& coverings);
// Without coverings (odd chains have none): d_cover is NaN, the rest as above.
DistanceSet distance_set(const DensityMatrix& rho);

// d_singlet alone, usable without coverings (open-chain observable).
double singlet_distance(const DensityMatrix& rho);

// Pairwise entanglement structure per the mutual-information map:
// off-diagonal (i,j): S(rho_i) + S(rho_j) - S(rho_ij) in bits; diagonal:
// 1 - S(rho_i).  `normalized` is raw / max(raw) (raw copy if the map is
// identically zero).
struct EntanglementMap {
    Eigen::MatrixXd raw;
    Eigen::MatrixXd normalized;
};

EntanglementMap entanglement_map(const PureState& state);

// S = -Tr rho log2 rho with 0 log 0 = 0.
double von_neumann_entropy_bits(const DensityMatrix& rho);

// |sum_n |c_n|^2 e^{-i E_n t}|^2 where c_n are the eigenbasis coefficients
// of `initial`.  For a partial eigensystem the initial state must be
// supported on the provided eigenvectors to residual 1e-8 (CapacityError
// otherwise).
double loschmidt_echo(const EigenSystem& eig, const PureState& initial, double t);

// Tr(rho . reference); both must live on the same site list.
double singlet_overlap(const DensityMatrix& rho, const DensityMatrix& reference);

} // namespace mgchain
