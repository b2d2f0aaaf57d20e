#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qbeam {

using cplx = std::complex<double>;
using ComplexMat = Eigen::MatrixXcd;
using ComplexVec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

enum class Allocator { eepa, aoepa, oepa, mmse };

// Which quantization-noise constant the model formulas use: `exact` matches
// the measured error variance of the mid-point quantizer (step^2/12 per real
// dimension), `nominal` is the smaller bookkeeping constant the closed-form
// allocation was derived with.
enum class PqnForm { exact, nominal };

// Analytic BER: exact Gray-coded square-QAM expression, or the first-order
// 4S/log2(M) truncation.
enum class BerForm { exact, first_order };

// Optimal allocation solver: direct KKT stationarity solve, or the
// omega-parameterized fixed-point iteration.
enum class OepaForm { kkt, fixed_point };

struct SvParams {
    double Lambda = 0.037;      // cluster arrival rate, 1/ns
    double lambda = 0.641;      // ray arrival rate, 1/ns
    double Gamma = 21.1;        // cluster power decay, ns
    double gamma = 8.85;        // ray power decay, ns
    double sigma_c = 3.01;      // cluster lognormal std, dB
    double sigma_r = 7.69;      // ray lognormal std, dB
    double mean_clusters = 3.0;
    double mean_rays = 5.0;
    double sample_period = 0.4; // ns
};

struct SimConfig {
    int n_t = 2;
    int n_r = 2;
    int n_subcarriers = 512;
    int l_cp = 64;
    int qam_order = 4;
    double noise_variance = 0.1;
    int adc_bits = 0;           // 0 means full precision
    double agc_alpha = 0.1;
    SvParams sv;
    long long trials = 200;     // OFDM symbols per measurement cell
    std::uint64_t seed = 0;

    int n_streams() const { return std::min(n_t, n_r); }
    bool full_precision() const { return adc_bits == 0; }
};

// Throws std::invalid_argument naming the offending field.
void validate(const SimConfig& cfg);

inline std::string allocator_name(Allocator a) {
    switch (a) {
        case Allocator::eepa: return "eepa";
        case Allocator::aoepa: return "aoepa";
        case Allocator::oepa: return "oepa";
        case Allocator::mmse: return "mmse";
    }
    return "?";
}

Allocator allocator_from_name(const std::string& name);

// splitmix64-style finalizer; gives every (master, stream) pair its own
// decorrelated, platform-stable seed so parallel cells never share state.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic generator with explicit transforms so results do not depend
// on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Unit-variance circularly symmetric complex Gaussian.
    cplx cgauss() {
        return cplx(gauss() * M_SQRT1_2, gauss() * M_SQRT1_2);
    }

    double exponential(double rate) {
        return -std::log(1.0 - uniform()) / rate;
    }

    int poisson(double mean) {
        double limit = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

    double lognormal(double mu, double sigma) {
        return std::exp(mu + sigma * gauss());
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qbeam
