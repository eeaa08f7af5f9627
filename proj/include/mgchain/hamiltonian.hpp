#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mgchain/sector.hpp"

namespace mgchain {

enum class Boundary { open, periodic };

// Heisenberg exchange bond S_a . S_b with the given coupling; a < b always.
struct Bond {
    int a;
    int b;
    double coupling;
};

// J1-J2 chain in a local field.  J1 is fixed to 1 and sets the energy unit.
// A field of strength h acts on the first n_field sites through
// +h * sum_j S^z_j, so positive h favors down spins on the field region.
struct ChainSpec {
    int n_sites;
    double j2 = 0.0;
    Boundary boundary = Boundary::open;
    double h = 0.0;
    int n_field = 0;
};

// Nearest-neighbour (coupling 1) plus next-nearest-neighbour (coupling j2)
// bonds of the chain.  Periodic wrap bonds that coincide with existing pairs
// on very short rings are merged by summing couplings.
std::vector<Bond> heisenberg_bonds(int n_sites, double j2, Boundary boundary);

// Real symmetric sparse operator on a fixed-polarization sector, stored as a
// dense diagonal plus CSR off-diagonal part (both triangles, for matvec).
class SparseOperator {
public:
    std::size_t dim() const { return diag_.size(); }
    const Eigen::VectorXd& diagonal() const { return diag_; }
    std::size_t n_offdiag() const { return val_.size(); }

    // y = H x; x and y must hold dim() doubles and must not alias.
    void matvec(const double* x, double* y) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

    Eigen::MatrixXd to_dense() const;

    friend SparseOperator build_operator(std::span<const Bond> bonds,
                                         std::span<const double> field_weight,
                                         const Sector& sector);

private:
    Eigen::VectorXd diag_;
    std::vector<std::int64_t> row_ptr_;
    std::vector<std::int32_t> col_;
    std::vector<double> val_;
};

// Assembles sum_bonds coupling * S_a . S_b + sum_j field_weight[j] * S^z_j
// restricted to `sector`.  field_weight may be empty (no field) or have one
// entry per site.  Throws DomainError for out-of-range bond sites.
SparseOperator build_operator(std::span<const Bond> bonds,
                              std::span<const double> field_weight,
                              const Sector& sector);

// Hamiltonian of `spec` restricted to `sector`.
SparseOperator build_hamiltonian(const ChainSpec& spec, const Sector& sector);

// Test hook: confirms assembly never connects states of different popcount
// (S^z conservation) by checking every off-diagonal entry across all sectors.
bool commutes_with_polarization(const ChainSpec& spec);

// The contiguous block of `count` sites farthest from the field region
// (sites 0..n_field-1).  Open chains use the last `count` sites; periodic
// chains maximize the minimal ring distance to the field, taking the
// smallest starting site on ties.
std::vector<int> far_sites(int n_sites, int count, Boundary boundary, int n_field);

} // namespace mgchain
