#pragma once

#include <cstdint>
#include <vector>

#include "mgchain/eigensolve.hpp"
#include "mgchain/hamiltonian.hpp"
#include "mgchain/observables.hpp"
#include "mgchain/states.hpp"

namespace mgchain {

struct TimeGrid {
    double t_max = 1000.0;
    int n_samples = 10000;
};

// A field quench: the ground state of the chain at field `pre_field` is
// evolved under `chain` (field chain.h).  Pre- and post-quench Hamiltonians
// differ only in the field strength, so the dynamics stays in one sector.
struct QuenchSpec {
    ChainSpec chain;            // post-quench Hamiltonian
    double pre_field = 0.0;     // h + epsilon (small) or h_i (large)
    int twice_l = 0;            // sector; large_quench overrides via global_ground
    TimeGrid grid;
    std::vector<int> observed_sites; // far subsystem for d_av/O_s/d_s
    std::uint64_t seed = 1234567;
    std::size_t dense_threshold = 16384;
};

struct Histogram {
    double lo = 0.0, hi = 0.0;  // range spanned by the bins
    std::vector<long> counts;
};

// Equal-width bins over [min, max] of the series; a degenerate range (all
// values equal) yields a single bin.  Counts sum to the series length.
Histogram time_statistics(std::span<const double> series, int n_bins);

struct QuenchTrace {
    std::vector<double> times;
    std::vector<double> le;        // Loschmidt echo
    std::vector<double> l_nprime;  // field-region magnetization
    std::vector<double> o_singlet; // far-subsystem singlet overlap
    std::vector<double> d_s;       // far-subsystem distance from the average
    double d_av0 = 0.0;            // initial distance from the average
    int twice_l = 0;               // sector actually evolved
    bool pre_ground_tie = false;   // degenerate initial state reported, not broken
    double pre_energy = 0.0;
    double post_ground_energy = 0.0;
    Histogram le_hist, l_nprime_hist, o_singlet_hist, d_s_hist;
};

// ψ(t) = sum_n c_n e^{-i E_n t} |n>; requires eig.full.
PureState evolve(const EigenSystem& eig, const PureState& initial, double t);

// Ground state of the sector at pre_field, evolved after the field drops to
// chain.h.  Always computes d_av0; the time series and histograms are filled
// only when with_series (the h-sweeps of the CLI need just d_av0 per cell).
QuenchTrace small_quench(const QuenchSpec& spec, bool with_series = true);

// Global ground state at h_i = pre_field (sector located across all
// polarization sectors), evolved at h_f = chain.h; full series + histograms.
QuenchTrace large_quench(const QuenchSpec& spec, int hist_bins = 50);

} // namespace mgchain
