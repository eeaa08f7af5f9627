#include "mgchain/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mgchain/errors.hpp"

namespace mgchain {

namespace {

void check_sites(int n_sites, std::span<const int> sites, const char* who) {
    if (sites.empty()) throw DomainError(std::string(who) + ": empty site list");
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (sites[i] < 0 || sites[i] >= n_sites)
            throw DomainError(std::string(who) + ": site " + std::to_string(sites[i]) +
                              " outside chain of " + std::to_string(n_sites));
        if (i > 0 && sites[i] <= sites[i - 1])
            throw DomainError(std::string(who) + ": keep sites must be strictly ascending");
    }
}

} // namespace

ReductionPlan::ReductionPlan(const Sector& sec, std::span<const int> keep) {
    check_sites(sec.n_sites(), keep, "reduction plan");
    const int k = static_cast<int>(keep.size());
    sub_dim_ = Eigen::Index{1} << k;
    BasisState keep_mask = 0;
    for (int s : keep) keep_mask |= BasisState{1} << s;

    struct Item {
        BasisState env;
        std::int32_t sub, idx;
    };
    std::vector<Item> items(sec.dim());
    for (std::size_t i = 0; i < sec.dim(); ++i) {
        const BasisState s = sec.state(i);
        std::int32_t sub = 0;
        for (int b = 0; b < k; ++b)
            sub |= static_cast<std::int32_t>((s >> keep[b]) & 1) << b;
        items[i] = {s & ~keep_mask, sub, static_cast<std::int32_t>(i)};
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        return a.env != b.env ? a.env < b.env : a.sub < b.sub;
    });
    entries_.reserve(items.size());
    bucket_begin_.push_back(0);
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0 && items[i].env != items[i - 1].env)
            bucket_begin_.push_back(static_cast<std::int64_t>(i));
        entries_.emplace_back(items[i].idx, items[i].sub);
    }
    bucket_begin_.push_back(static_cast<std::int64_t>(items.size()));
}

void ReductionPlan::accumulate(const Eigen::VectorXcd& amp, Eigen::MatrixXcd& acc) const {
    // loops over occupied (state, state) pairs only — buckets are tiny
    for (std::size_t b = 0; b + 1 < bucket_begin_.size(); ++b) {
        for (std::int64_t e1 = bucket_begin_[b]; e1 < bucket_begin_[b + 1]; ++e1)
            for (std::int64_t e2 = bucket_begin_[b]; e2 < bucket_begin_[b + 1]; ++e2)
                acc(entries_[e1].second, entries_[e2].second) +=
                    amp[entries_[e1].first] * std::conj(amp[entries_[e2].first]);
    }
}

void ReductionPlan::accumulate_real(const Eigen::VectorXd& amp, Eigen::MatrixXd& acc) const {
    for (std::size_t b = 0; b + 1 < bucket_begin_.size(); ++b) {
        for (std::int64_t e1 = bucket_begin_[b]; e1 < bucket_begin_[b + 1]; ++e1)
            for (std::int64_t e2 = bucket_begin_[b]; e2 < bucket_begin_[b + 1]; ++e2)
                acc(entries_[e1].second, entries_[e2].second) +=
                    amp[entries_[e1].first] * amp[entries_[e2].first];
    }
}

Eigen::MatrixXcd ReductionPlan::reduce(const Eigen::VectorXcd& amp) const {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(sub_dim_, sub_dim_);
    accumulate(amp, rho);
    return rho;
}

PureState::PureState(SectorPtr sector, Eigen::VectorXcd amp)
    : sector_(std::move(sector)), amp_(std::move(amp)) {
    if (!sector_) throw DomainError("pure state: null sector");
    if (static_cast<std::size_t>(amp_.size()) != sector_->dim())
        throw DomainError("pure state: amplitude count " + std::to_string(amp_.size()) +
                          " != sector dimension " + std::to_string(sector_->dim()));
    const double norm = amp_.norm();
    if (std::abs(norm - 1.0) > 1e-8)
        throw DomainError("pure state: norm " + std::to_string(norm) + " is not 1");
    amp_ /= norm;
}

PureState::PureState(SectorPtr sector, const Eigen::VectorXd& amp)
    : PureState(std::move(sector), Eigen::VectorXcd(amp.cast<std::complex<double>>())) {}

DensityMatrix::DensityMatrix(std::vector<int> sites, Eigen::MatrixXcd m)
    : sites_(std::move(sites)), m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() != (Eigen::Index{1} << sites_.size()))
        throw DomainError("density matrix: dimension " + std::to_string(m_.rows()) +
                          " does not match " + std::to_string(sites_.size()) + " sites");
    // The bound has to absorb accumulation roundoff from reductions over
    // sectors up to the dense cap (~16k terms, so ~4e-12 on the trace) while
    // still catching real normalization mistakes.
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw DomainError("density matrix: not Hermitian");
    if (std::abs(m_.trace().real() - 1.0) > 1e-10 || std::abs(m_.trace().imag()) > 1e-10)
        throw DomainError("density matrix: trace " + std::to_string(m_.trace().real()) +
                          " is not 1");
    // Positivity check is an O(dim^3) eigensolve; skip it for subsystems
    // beyond 9 sites where construction cost would dominate.
    if (m_.rows() <= 512) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw DomainError("density matrix: negative eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()));
    }
}

CoveringPair mg_covering_states(int n_sites, Boundary boundary) {
    if (n_sites < 2 || n_sites % 2 != 0)
        throw DomainError("mg coverings: need even N >= 2, got " + std::to_string(n_sites));
    auto sector = std::make_shared<Sector>(n_sites, 0);
    const int pairs = n_sites / 2;
    const double amp0 = std::pow(2.0, -0.5 * pairs);

    // Enumerates the 2^{N/2} product terms of a covering: per pair, either
    // (up,down) with + or (down,up) with -.
    auto build = [&](const std::vector<std::pair<int, int>>& pairing) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sector->dim()));
        for (std::uint32_t pattern = 0; pattern < (1u << pairs); ++pattern) {
            BasisState s = 0;
            double sign = 1.0;
            for (int p = 0; p < pairs; ++p) {
                const auto [first, second] = pairing[p];
                if ((pattern >> p) & 1) {
                    s |= BasisState{1} << second;
                    sign = -sign;
                } else {
                    s |= BasisState{1} << first;
                }
            }
            v[static_cast<Eigen::Index>(sector->rank(s))] = sign * amp0;
        }
        return v;
    };

    std::vector<std::pair<int, int>> p1;
    for (int l = 0; l < pairs; ++l) p1.emplace_back(2 * l, 2 * l + 1);
    Eigen::VectorXd v1 = build(p1);
    CoveringPair out{PureState(sector, v1), std::nullopt, 0.0};

    if (boundary == Boundary::periodic) {
        // shifted covering (1,2),(3,4),...,(N-1,0); the wrap pair carries
        // site N-1 as its first arrow
        std::vector<std::pair<int, int>> p2;
        for (int l = 0; l + 1 < pairs; ++l) p2.emplace_back(2 * l + 1, 2 * l + 2);
        p2.emplace_back(n_sites - 1, 0);
        Eigen::VectorXd v2 = build(p2);
        out.psi2 = PureState(sector, v2);
        out.overlap = v1.dot(v2);
    }
    return out;
}

PureState basis_product_state(SectorPtr sector, BasisState bits) {
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sector->dim()));
    amp[static_cast<Eigen::Index>(sector->rank(bits))] = 1.0;
    return PureState(std::move(sector), std::move(amp));
}

DensityMatrix partial_trace(const PureState& state, std::span<const int> keep_sites) {
    check_sites(state.n_sites(), keep_sites, "partial_trace");
    if (keep_sites.size() > 14)
        throw CapacityError("partial_trace: subsystem of " + std::to_string(keep_sites.size()) +
                            " sites exceeds the 14-site dense cap");
    ReductionPlan plan(state.sector(), keep_sites);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(plan.sub_dim(), plan.sub_dim());
    plan.accumulate(state.amplitudes(), rho);
    return DensityMatrix(std::vector<int>(keep_sites.begin(), keep_sites.end()), std::move(rho));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep_sites) {
    // keep_sites must be an ascending subset of rho.sites()
    std::vector<int> pos;
    for (int s : keep_sites) {
        auto it = std::find(rho.sites().begin(), rho.sites().end(), s);
        if (it == rho.sites().end())
            throw DomainError("partial_trace: site " + std::to_string(s) +
                              " not part of the input density matrix");
        pos.push_back(static_cast<int>(it - rho.sites().begin()));
    }
    for (std::size_t i = 1; i < pos.size(); ++i)
        if (pos[i] <= pos[i - 1])
            throw DomainError("partial_trace: keep sites must be strictly ascending");
    const int k_out = static_cast<int>(pos.size());
    const Eigen::Index dim_out = Eigen::Index{1} << k_out;
    std::uint32_t keep_mask = 0;
    for (int p : pos) keep_mask |= 1u << p;

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_out, dim_out);
    const Eigen::Index dim_in = rho.dim();
    auto sub_of = [&](std::uint32_t full) {
        std::uint32_t sub = 0;
        for (int b = 0; b < k_out; ++b) sub |= ((full >> pos[b]) & 1u) << b;
        return sub;
    };
    for (Eigen::Index r = 0; r < dim_in; ++r) {
        for (Eigen::Index c = 0; c < dim_in; ++c) {
            const auto fr = static_cast<std::uint32_t>(r), fc = static_cast<std::uint32_t>(c);
            if ((fr & ~keep_mask) != (fc & ~keep_mask)) continue;
            out(sub_of(fr), sub_of(fc)) += rho.matrix()(r, c);
        }
    }
    return DensityMatrix(std::vector<int>(keep_sites.begin(), keep_sites.end()), std::move(out));
}

DensityMatrix time_averaged_state(const EigenSystem& eig, const PureState& initial,
                                  std::span<const int> keep_sites) {
    if (!eig.full)
        throw CapacityError("time_averaged_state: dephasing needs the full spectrum");
    if (eig.vectors.rows() != static_cast<Eigen::Index>(initial.sector().dim()))
        throw DomainError("time_averaged_state: eigensystem/state dimension mismatch");
    check_sites(initial.n_sites(), keep_sites, "time_averaged_state");
    ReductionPlan plan(initial.sector(), keep_sites);
    const auto groups = degenerate_groups(eig.energies);

    const bool real_state = initial.amplitudes().imag().cwiseAbs().maxCoeff() == 0.0;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(plan.sub_dim(), plan.sub_dim());
    if (real_state) {
        const Eigen::VectorXd amp = initial.amplitudes().real();
        const Eigen::VectorXd c = eig.vectors.transpose() * amp;
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(plan.sub_dim(), plan.sub_dim());
        Eigen::VectorXd phi(eig.vectors.rows());
        for (auto [b, e] : groups) {
            phi.noalias() = eig.vectors.middleCols(b, e - b) * c.segment(b, e - b);
            plan.accumulate_real(phi, acc);
        }
        rho = acc.cast<std::complex<double>>();
    } else {
        const Eigen::VectorXcd c = eig.vectors.transpose() * initial.amplitudes();
        Eigen::VectorXcd phi(eig.vectors.rows());
        for (auto [b, e] : groups) {
            phi.noalias() = eig.vectors.middleCols(b, e - b) * c.segment(b, e - b);
            plan.accumulate(phi, rho);
        }
    }
    return DensityMatrix(std::vector<int>(keep_sites.begin(), keep_sites.end()), std::move(rho));
}

} // namespace mgchain
