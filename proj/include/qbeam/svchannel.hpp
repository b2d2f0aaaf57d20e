#pragma once

#include <vector>

#include "qbeam/core.hpp"

namespace qbeam {

struct TapEntry {
    double cluster_delay = 0.0;  // ns
    double ray_delay = 0.0;      // ns, relative to its cluster
    cplx gain{0.0, 0.0};
};

using TapSet = std::vector<TapEntry>;

// Clustered multipath draw: Poisson cluster/ray counts (minimum one each),
// exponential inter-arrivals, lognormal gain magnitudes whose mean-square
// power decays as exp(-T/Gamma - tau/gamma), uniform phase. The first
// cluster arrives at delay 0, as does the first ray within each cluster.
// Gains are relative to E[|g_00|^2] = 1; ensemble energy normalization
// happens in realize_channel.
TapSet generate_sv_realization(const SvParams& params, std::uint64_t seed);

struct Discretized {
    ComplexVec taps;
    double dropped_fraction = 0.0;
};

// Accumulates each ray into the bin nearest its absolute delay. Energy
// landing at or beyond l_taps bins is dropped and reported. Throws if
// nothing lands inside the window.
Discretized discretize(const TapSet& taps, double sample_period, int l_taps);

// Scale factor making the ensemble-average discrete channel energy equal 1
// for this parameter set and window. Monte-Carlo calibrated over the delay
// structure (the lognormal magnitudes are mean-square exact by construction)
// and cached per (params, l_taps).
double sv_energy_scale(const SvParams& params, int l_taps);

struct DiscreteChannel {
    int n_r = 0;
    int n_t = 0;
    int l_taps = 0;
    std::vector<ComplexVec> h;  // [j * n_t + i] -> impulse response of pair (rx j, tx i)

    const ComplexVec& pair(int rx, int tx) const { return h[rx * n_t + tx]; }
};

// Independent realization per antenna pair, one derived stream seed each,
// normalized by sv_energy_scale.
DiscreteChannel realize_channel(const SvParams& params, int l_taps, int n_r, int n_t,
                                std::uint64_t seed);

}  // namespace qbeam
