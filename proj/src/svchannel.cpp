#include "qbeam/svchannel.hpp"

#include <map>
#include <mutex>
#include <tuple>

namespace qbeam {

TapSet generate_sv_realization(const SvParams& params, std::uint64_t seed) {
    Rng rng(seed);
    TapSet out;

    int n_clusters = std::max(1, rng.poisson(params.mean_clusters));
    double sigma_ln =
        std::sqrt(params.sigma_c * params.sigma_c + params.sigma_r * params.sigma_r) *
        std::log(10.0) / 20.0;

    double cluster_delay = 0.0;
    for (int cidx = 0; cidx < n_clusters; ++cidx) {
        if (cidx > 0) cluster_delay += rng.exponential(params.Lambda);
        int n_rays = std::max(1, rng.poisson(params.mean_rays));
        double ray_delay = 0.0;
        for (int ridx = 0; ridx < n_rays; ++ridx) {
            if (ridx > 0) ray_delay += rng.exponential(params.lambda);
            double mean_sq = std::exp(-cluster_delay / params.Gamma - ray_delay / params.gamma);
            double mu = 0.5 * std::log(mean_sq) - sigma_ln * sigma_ln;
            double mag = rng.lognormal(mu, sigma_ln);
            double phase = 2.0 * M_PI * rng.uniform();
            out.push_back({cluster_delay, ray_delay, std::polar(mag, phase)});
        }
    }
    return out;
}

Discretized discretize(const TapSet& taps, double sample_period, int l_taps) {
    if (!(sample_period > 0.0)) throw std::invalid_argument("discretize: sample_period must be positive");
    if (l_taps < 1) throw std::invalid_argument("discretize: l_taps must be >= 1");

    Discretized out;
    out.taps = ComplexVec::Zero(l_taps);
    double kept = 0.0, dropped = 0.0;
    for (const TapEntry& t : taps) {
        double delay = t.cluster_delay + t.ray_delay;
        long bin = std::lround(delay / sample_period);
        double energy = std::norm(t.gain);
        if (bin >= l_taps) {
            dropped += energy;
            continue;
        }
        out.taps[bin] += t.gain;
        kept += energy;
    }
    if (kept == 0.0) throw std::runtime_error("discretize: all tap energy falls outside the window");
    out.dropped_fraction = dropped / (kept + dropped);
    return out;
}

namespace {

// E[sum |h[n]|^2] of an unnormalized draw equals the expected sum of
// per-ray mean-square powers landing inside the window (phases are uniform,
// so cross terms vanish and the lognormal magnitude is mean-square exact).
double expected_window_energy(const SvParams& params, int l_taps, std::uint64_t seed, int reps) {
    Rng rng(seed);
    double window = (l_taps - 1) * params.sample_period + 0.5 * params.sample_period;
    double acc = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        int n_clusters = std::max(1, rng.poisson(params.mean_clusters));
        double cluster_delay = 0.0;
        for (int cidx = 0; cidx < n_clusters; ++cidx) {
            if (cidx > 0) cluster_delay += rng.exponential(params.Lambda);
            int n_rays = std::max(1, rng.poisson(params.mean_rays));
            double ray_delay = 0.0;
            for (int ridx = 0; ridx < n_rays; ++ridx) {
                if (ridx > 0) ray_delay += rng.exponential(params.lambda);
                if (cluster_delay + ray_delay < window)
                    acc += std::exp(-cluster_delay / params.Gamma - ray_delay / params.gamma);
            }
        }
    }
    return acc / reps;
}

}  // namespace

double sv_energy_scale(const SvParams& params, int l_taps) {
    using Key = std::tuple<double, double, double, double, double, double, double, int>;
    static std::map<Key, double> cache;
    static std::mutex mtx;

    Key key{params.Lambda, params.lambda, params.Gamma, params.gamma,
            params.mean_clusters, params.mean_rays, params.sample_period, l_taps};
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    double mean_energy = expected_window_energy(params, l_taps, 0x5eedca11bULL, 200000);
    double scale = 1.0 / mean_energy;
    std::lock_guard<std::mutex> lock(mtx);
    cache[key] = scale;
    return scale;
}

DiscreteChannel realize_channel(const SvParams& params, int l_taps, int n_r, int n_t,
                                std::uint64_t seed) {
    DiscreteChannel ch;
    ch.n_r = n_r;
    ch.n_t = n_t;
    ch.l_taps = l_taps;
    ch.h.resize(static_cast<size_t>(n_r) * n_t);
    double root_scale = std::sqrt(sv_energy_scale(params, l_taps));
    for (int j = 0; j < n_r; ++j) {
        for (int i = 0; i < n_t; ++i) {
            std::uint64_t pair_seed = derive_stream_seed(seed, static_cast<std::uint64_t>(j) * n_t + i);
            TapSet taps = generate_sv_realization(params, pair_seed);
            ch.h[static_cast<size_t>(j) * n_t + i] =
                root_scale * discretize(taps, params.sample_period, l_taps).taps;
        }
    }
    return ch;
}

}  // namespace qbeam
