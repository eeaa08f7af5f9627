#include "mgchain/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <string>
#include <utility>

#include "mgchain/errors.hpp"

namespace mgchain {

std::vector<Bond> heisenberg_bonds(int n_sites, double j2, Boundary boundary) {
    if (n_sites < 2)
        throw DomainError("bonds: need at least 2 sites, got " + std::to_string(n_sites));
    // Ordered pair -> summed coupling, so wrap bonds of short rings merge.
    std::map<std::pair<int, int>, double> acc;
    auto add = [&](int a, int b, double c) {
        if (a == b) return; // degenerate wrap on a 2-site ring's NNN bond
        if (a > b) std::swap(a, b);
        acc[{a, b}] += c;
    };
    for (int j = 0; j + 1 < n_sites; ++j) add(j, j + 1, 1.0);
    if (boundary == Boundary::periodic) add(n_sites - 1, 0, 1.0);
    if (j2 != 0.0) {
        for (int j = 0; j + 2 < n_sites; ++j) add(j, j + 2, j2);
        if (boundary == Boundary::periodic) {
            add(n_sites - 2, 0, j2);
            add(n_sites - 1, 1, j2);
        }
    }
    std::vector<Bond> bonds;
    bonds.reserve(acc.size());
    for (const auto& [pair, c] : acc) bonds.push_back({pair.first, pair.second, c});
    return bonds;
}

void SparseOperator::matvec(const double* x, double* y) const {
    const std::size_t n = dim();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = diag_[i] * x[i];
        for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            acc += val_[k] * x[col_[k]];
        y[i] = acc;
    }
}

Eigen::VectorXd SparseOperator::apply(const Eigen::VectorXd& x) const {
    if (static_cast<std::size_t>(x.size()) != dim())
        throw DomainError("matvec: vector length " + std::to_string(x.size()) +
                          " != operator dimension " + std::to_string(dim()));
    Eigen::VectorXd y(x.size());
    matvec(x.data(), y.data());
    return y;
}

Eigen::MatrixXd SparseOperator::to_dense() const {
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = diag_[i];
        for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) m(i, col_[k]) = val_[k];
    }
    return m;
}

SparseOperator build_operator(std::span<const Bond> bonds,
                              std::span<const double> field_weight,
                              const Sector& sector) {
    const int n = sector.n_sites();
    for (const Bond& b : bonds) {
        if (b.a < 0 || b.b < 0 || b.a >= n || b.b >= n || b.a == b.b)
            throw DomainError("build_operator: bond (" + std::to_string(b.a) + "," +
                              std::to_string(b.b) + ") invalid for n_sites=" + std::to_string(n));
    }
    if (!field_weight.empty() && field_weight.size() != static_cast<std::size_t>(n))
        throw DomainError("build_operator: field_weight has " +
                          std::to_string(field_weight.size()) + " entries, expected " +
                          std::to_string(n));

    const std::size_t dim = sector.dim();
    SparseOperator op;
    op.diag_.resize(static_cast<Eigen::Index>(dim));
    op.row_ptr_.assign(dim + 1, 0);

    // Pass 1: diagonal and per-row off-diagonal counts.
    for (std::size_t i = 0; i < dim; ++i) {
        const BasisState s = sector.state(i);
        double d = 0.0;
        std::int64_t cnt = 0;
        for (const Bond& b : bonds) {
            const bool ua = (s >> b.a) & 1, ub = (s >> b.b) & 1;
            d += b.coupling * (ua == ub ? 0.25 : -0.25);
            if (ua != ub) ++cnt;
        }
        for (std::size_t j = 0; j < field_weight.size(); ++j)
            d += field_weight[j] * (((s >> j) & 1) ? 0.5 : -0.5);
        op.diag_[static_cast<Eigen::Index>(i)] = d;
        op.row_ptr_[i + 1] = cnt;
    }
    for (std::size_t i = 0; i < dim; ++i) op.row_ptr_[i + 1] += op.row_ptr_[i];

    // Pass 2: spin-flip matrix elements (S+_a S-_b + S-_a S+_b) / 2.
    op.col_.resize(static_cast<std::size_t>(op.row_ptr_[dim]));
    op.val_.resize(op.col_.size());
    std::vector<std::int64_t> cursor(op.row_ptr_.begin(), op.row_ptr_.end() - 1);
    for (std::size_t i = 0; i < dim; ++i) {
        const BasisState s = sector.state(i);
        for (const Bond& b : bonds) {
            const bool ua = (s >> b.a) & 1, ub = (s >> b.b) & 1;
            if (ua == ub) continue;
            const BasisState flipped = s ^ ((BasisState{1} << b.a) | (BasisState{1} << b.b));
            const std::size_t j = sector.rank(flipped);
            op.col_[cursor[i]] = static_cast<std::int32_t>(j);
            op.val_[cursor[i]] = 0.5 * b.coupling;
            ++cursor[i];
        }
    }
    // Same-row entries produced by distinct bonds can hit the same column on
    // short rings; CSR with duplicate columns still sums correctly in matvec,
    // but merged bonds from heisenberg_bonds() already avoid that case.
    return op;
}

SparseOperator build_hamiltonian(const ChainSpec& spec, const Sector& sector) {
    if (spec.n_sites != sector.n_sites())
        throw DomainError("build_hamiltonian: spec has n_sites=" + std::to_string(spec.n_sites) +
                          " but sector has " + std::to_string(sector.n_sites()));
    if (spec.n_field < 0 || spec.n_field > spec.n_sites)
        throw DomainError("build_hamiltonian: n_field=" + std::to_string(spec.n_field) +
                          " outside [0," + std::to_string(spec.n_sites) + "]");
    const auto bonds = heisenberg_bonds(spec.n_sites, spec.j2, spec.boundary);
    std::vector<double> weight;
    if (spec.h != 0.0 && spec.n_field > 0) {
        weight.assign(spec.n_sites, 0.0);
        for (int j = 0; j < spec.n_field; ++j) weight[j] = spec.h;
    }
    return build_operator(bonds, weight, sector);
}

bool commutes_with_polarization(const ChainSpec& spec) {
    const auto bonds = heisenberg_bonds(spec.n_sites, spec.j2, spec.boundary);
    for (int t : Sector::all_twice_l(spec.n_sites)) {
        Sector sec(spec.n_sites, t);
        build_hamiltonian(spec, sec); // rank() would throw on a sector-leaving element
        for (BasisState s : sec.states()) {
            for (const Bond& b : bonds) {
                const bool ua = (s >> b.a) & 1, ub = (s >> b.b) & 1;
                if (ua == ub) continue;
                const BasisState f = s ^ ((BasisState{1} << b.a) | (BasisState{1} << b.b));
                if (std::popcount(f) != std::popcount(s)) return false;
            }
        }
    }
    return true;
}

std::vector<int> far_sites(int n_sites, int count, Boundary boundary, int n_field) {
    if (count < 1 || count > n_sites - n_field)
        throw DomainError("far_sites: cannot pick " + std::to_string(count) +
                          " sites outside a field of " + std::to_string(n_field) + " on " +
                          std::to_string(n_sites) + " sites");
    std::vector<int> out;
    if (boundary == Boundary::open || n_field == 0) {
        for (int j = n_sites - count; j < n_sites; ++j) out.push_back(j);
        return out;
    }
    auto ring_dist = [n_sites](int a, int b) {
        int d = std::abs(a - b) % n_sites;
        return std::min(d, n_sites - d);
    };
    int best_start = 0, best_score = -1;
    for (int start = 0; start < n_sites; ++start) {
        int score = n_sites;
        for (int i = 0; i < count; ++i) {
            const int site = (start + i) % n_sites;
            for (int f = 0; f < n_field; ++f) score = std::min(score, ring_dist(site, f));
        }
        if (score > best_score) {
            best_score = score;
            best_start = start;
        }
    }
    for (int i = 0; i < count; ++i) out.push_back((best_start + i) % n_sites);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace mgchain
