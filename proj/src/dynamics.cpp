#include "mgchain/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <cblas.h>

#include "mgchain/errors.hpp"

namespace mgchain {

namespace {

void check_grid(const TimeGrid& grid) {
    if (grid.n_samples < 2)
        throw DomainError("quench: need at least 2 time samples, got " +
                          std::to_string(grid.n_samples));
    if (!(grid.t_max > 0.0))
        throw DomainError("quench: t_max must be positive");
}

// C = A * B for column-major doubles via BLAS (A: n x n, B/C: n x cols).
void dgemm_nn(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::MatrixXd& c) {
    const auto n = static_cast<int>(a.rows());
    const auto cols = static_cast<int>(b.cols());
    c.resize(n, cols);
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, cols, n, 1.0, a.data(), n,
                b.data(), n, 0.0, c.data(), n);
}

// Per-basis-state S^z weights of `sites`, for O(dim) expectation values.
Eigen::VectorXd sz_weights(const Sector& sec, std::span<const int> sites) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(sec.dim()));
    for (std::size_t i = 0; i < sec.dim(); ++i) {
        double acc = 0.0;
        for (int j : sites) acc += ((sec.state(i) >> j) & 1) ? 0.5 : -0.5;
        w[static_cast<Eigen::Index>(i)] = acc;
    }
    return w;
}

struct QuenchSetup {
    SectorPtr sector;
    EigenSystem post;        // full spectrum of the post-quench Hamiltonian
    Eigen::VectorXd psi0;    // pre-quench ground state (real)
    Eigen::VectorXd c;       // eigenbasis coefficients of psi0
    std::vector<int> observed;
};

// Fills the time series of a prepared quench into `trace`.
void run_series(const QuenchSetup& setup, const QuenchSpec& spec, QuenchTrace& trace,
                const Eigen::MatrixXcd& rho_bar, const ReductionPlan& plan_far) {
    check_grid(spec.grid);
    const auto n = static_cast<Eigen::Index>(setup.sector->dim());
    const int n_samples = spec.grid.n_samples;
    const bool even_chain = spec.chain.n_sites % 2 == 0;

    trace.times.resize(n_samples);
    for (int i = 0; i < n_samples; ++i)
        trace.times[i] = spec.grid.t_max * i / (n_samples - 1);

    // field-region magnetization weights (zero field region -> constant 0)
    std::vector<int> field_sites;
    for (int j = 0; j < spec.chain.n_field; ++j) field_sites.push_back(j);
    const Eigen::VectorXd w_field =
        field_sites.empty() ? Eigen::VectorXd::Zero(n) : sz_weights(*setup.sector, field_sites);

    // far-subsystem singlet reference: the psi1 covering reduced to the
    // observed sites (defined for even chains only)
    Eigen::MatrixXcd ref;
    if (even_chain) {
        CoveringPair cov = mg_covering_states(spec.chain.n_sites, spec.chain.boundary);
        ref = partial_trace(cov.psi1, setup.observed).matrix();
    }

    trace.le.resize(n_samples);
    trace.l_nprime.resize(n_samples);
    trace.d_s.resize(n_samples);
    if (even_chain) trace.o_singlet.resize(n_samples);

    const Eigen::VectorXd& e = setup.post.energies;
    const Eigen::VectorXd c2 = setup.c.array().square();

    constexpr int kChunk = 128;
    Eigen::MatrixXd cr(n, kChunk), ci(n, kChunk), psi_r, psi_i;
    for (int begin = 0; begin < n_samples; begin += kChunk) {
        const int cols = std::min(kChunk, n_samples - begin);
        for (int t = 0; t < cols; ++t) {
            const double tt = trace.times[begin + t];
            for (Eigen::Index m = 0; m < n; ++m) {
                const double th = e[m] * tt;
                cr(m, t) = setup.c[m] * std::cos(th);
                ci(m, t) = -setup.c[m] * std::sin(th);
            }
        }
        dgemm_nn(setup.post.vectors, cr.leftCols(cols), psi_r);
        dgemm_nn(setup.post.vectors, ci.leftCols(cols), psi_i);

        for (int t = 0; t < cols; ++t) {
            const int i = begin + t;
            // Loschmidt echo straight from the spectral coefficients
            std::complex<double> z = 0.0;
            for (Eigen::Index m = 0; m < n; ++m) {
                const double th = e[m] * trace.times[i];
                z += c2[m] * std::complex<double>(std::cos(th), -std::sin(th));
            }
            trace.le[i] = std::clamp(std::norm(z), 0.0, 1.0);

            trace.l_nprime[i] = 0.0;
            for (Eigen::Index m = 0; m < n; ++m)
                trace.l_nprime[i] +=
                    w_field[m] * (psi_r(m, t) * psi_r(m, t) + psi_i(m, t) * psi_i(m, t));

            Eigen::VectorXcd psi(n);
            psi.real() = psi_r.col(t);
            psi.imag() = psi_i.col(t);
            const Eigen::MatrixXcd rho_s = plan_far.reduce(psi);
            trace.d_s[i] = trace_norm(rho_s - rho_bar);
            if (even_chain) trace.o_singlet[i] = (rho_s * ref).trace().real();
        }
    }
}

void fill_histograms(QuenchTrace& trace, int bins) {
    if (!trace.le.empty()) trace.le_hist = time_statistics(trace.le, bins);
    if (!trace.l_nprime.empty()) trace.l_nprime_hist = time_statistics(trace.l_nprime, bins);
    if (!trace.o_singlet.empty()) trace.o_singlet_hist = time_statistics(trace.o_singlet, bins);
    if (!trace.d_s.empty()) trace.d_s_hist = time_statistics(trace.d_s, bins);
}

} // namespace

Histogram time_statistics(std::span<const double> series, int n_bins) {
    if (series.empty()) throw DomainError("time_statistics: empty series");
    if (n_bins < 1) throw DomainError("time_statistics: need at least one bin");
    const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
    Histogram h;
    h.lo = *lo_it;
    h.hi = *hi_it;
    if (h.lo == h.hi) {
        h.counts.assign(1, static_cast<long>(series.size()));
        return h;
    }
    h.counts.assign(n_bins, 0);
    const double width = (h.hi - h.lo) / n_bins;
    for (double x : series) {
        auto idx = static_cast<long>((x - h.lo) / width);
        idx = std::clamp<long>(idx, 0, n_bins - 1);
        ++h.counts[idx];
    }
    return h;
}

PureState evolve(const EigenSystem& eig, const PureState& initial, double t) {
    if (!eig.full)
        throw CapacityError("evolve: spectral evolution needs the full spectrum");
    if (eig.vectors.rows() != initial.amplitudes().size())
        throw DomainError("evolve: eigensystem/state dimension mismatch");
    const Eigen::VectorXcd c = eig.vectors.transpose() * initial.amplitudes();
    Eigen::VectorXcd phased(c.size());
    for (Eigen::Index m = 0; m < c.size(); ++m)
        phased[m] = c[m] * std::exp(std::complex<double>(0.0, -eig.energies[m] * t));
    Eigen::VectorXcd amp = eig.vectors.cast<std::complex<double>>() * phased;
    return PureState(initial.sector_ptr(), std::move(amp));
}

QuenchTrace small_quench(const QuenchSpec& spec, bool with_series) {
    check_grid(spec.grid);
    auto sector = std::make_shared<Sector>(spec.chain.n_sites, spec.twice_l);

    ChainSpec pre = spec.chain;
    pre.h = spec.pre_field;

    LanczosOptions opts;
    opts.seed = spec.seed;

    QuenchTrace trace;
    trace.twice_l = spec.twice_l;

    const auto pre_op = build_hamiltonian(pre, *sector);
    const int k = std::min<int>(2, static_cast<int>(sector->dim()));
    EigenSystem pre_sys = lowest_pairs(pre_op, k, spec.dense_threshold, opts);
    trace.pre_energy = pre_sys.energies[0];
    trace.pre_ground_tie =
        k > 1 && pre_sys.energies[1] - pre_sys.energies[0] <= degeneracy_tol(pre_sys.energies[0]);

    QuenchSetup setup;
    setup.sector = sector;
    setup.psi0 = pre_sys.vectors.col(0);
    setup.post = dense_eig(build_hamiltonian(spec.chain, *sector), spec.dense_threshold);
    setup.c = setup.post.vectors.transpose() * setup.psi0;
    setup.observed = spec.observed_sites.empty()
                         ? far_sites(spec.chain.n_sites, 2, spec.chain.boundary, spec.chain.n_field)
                         : spec.observed_sites;
    trace.post_ground_energy = setup.post.energies[0];

    const ReductionPlan plan_far(*sector, setup.observed);
    const PureState psi0_state(sector, setup.psi0);

    // dephased far-subsystem state and the t=0 distance from it
    const DensityMatrix rho_bar_dm = time_averaged_state(setup.post, psi0_state, setup.observed);
    const Eigen::MatrixXcd rho0 = plan_far.reduce(psi0_state.amplitudes());
    trace.d_av0 = trace_norm(rho0 - rho_bar_dm.matrix());

    if (with_series) {
        run_series(setup, spec, trace, rho_bar_dm.matrix(), plan_far);
        fill_histograms(trace, 50);
    }
    return trace;
}

QuenchTrace large_quench(const QuenchSpec& spec, int hist_bins) {
    check_grid(spec.grid);
    ChainSpec pre = spec.chain;
    pre.h = spec.pre_field;

    LanczosOptions opts;
    opts.seed = spec.seed;

    const auto sectors = Sector::all_twice_l(spec.chain.n_sites);
    GroundReport report = global_ground(pre, sectors, opts, spec.dense_threshold);

    QuenchTrace trace;
    trace.twice_l = report.global().twice_l;
    trace.pre_ground_tie = !report.global_unique;
    trace.pre_energy = report.global().energy;

    auto sector = std::make_shared<Sector>(spec.chain.n_sites, trace.twice_l);
    QuenchSetup setup;
    setup.sector = sector;
    setup.psi0 = report.global().vector;
    setup.post = dense_eig(build_hamiltonian(spec.chain, *sector), spec.dense_threshold);
    setup.c = setup.post.vectors.transpose() * setup.psi0;
    setup.observed = spec.observed_sites.empty()
                         ? far_sites(spec.chain.n_sites, 4, spec.chain.boundary, spec.chain.n_field)
                         : spec.observed_sites;
    trace.post_ground_energy = setup.post.energies[0];

    const ReductionPlan plan_far(*sector, setup.observed);
    const PureState psi0_state(sector, setup.psi0);
    const DensityMatrix rho_bar_dm = time_averaged_state(setup.post, psi0_state, setup.observed);
    const Eigen::MatrixXcd rho0 = plan_far.reduce(psi0_state.amplitudes());
    trace.d_av0 = trace_norm(rho0 - rho_bar_dm.matrix());

    run_series(setup, spec, trace, rho_bar_dm.matrix(), plan_far);
    fill_histograms(trace, hist_bins);
    return trace;
}

} // namespace mgchain
