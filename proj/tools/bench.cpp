#include <chrono>
#include <cstdio>
#include <vector>

#include "qbeam/harness.hpp"

using namespace qbeam;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

bool tables_identical(const ResultTable& a, const ResultTable& b) {
    if (a.fingerprint != b.fingerprint || a.rows.size() != b.rows.size()) return false;
    for (size_t i = 0; i < a.rows.size(); ++i) {
        const TrialResult& x = a.rows[i];
        const TrialResult& y = b.rows[i];
        if (x.alloc != y.alloc || x.adc_bits != y.adc_bits || x.snr_db != y.snr_db ||
            x.trials != y.trials || x.bits_sent != y.bits_sent ||
            x.bit_errors != y.bit_errors || x.ber_mc != y.ber_mc ||
            x.ber_stderr != y.ber_stderr || x.ber_analytic != y.ber_analytic ||
            x.mse_mc != y.mse_mc || x.mse_analytic != y.mse_analytic ||
            x.converged != y.converged)
            return false;
    }
    return true;
}

}  // namespace

int main() {
    SimConfig cfg;
    cfg.n_subcarriers = 64;
    cfg.l_cp = 16;
    cfg.sv.sample_period = 3.2;
    cfg.trials = 60;

    std::vector<double> snrs = {10, 15, 20, 25};
    std::vector<Allocator> allocs = {Allocator::eepa, Allocator::aoepa};
    std::vector<int> bits = {3, 0};
    int n_channels = 6;

    std::printf("cells: %zu (channels x allocators x precisions x SNRs)\n",
                static_cast<size_t>(n_channels) * allocs.size() * bits.size() * snrs.size());

    auto t0 = clock_type::now();
    ResultTable serial = sweep_serial(cfg, snrs, allocs, bits, n_channels);
    double t_serial = seconds_since(t0);
    std::printf("serial:  %.3f s\n", t_serial);

    t0 = clock_type::now();
    ResultTable parallel = sweep(cfg, snrs, allocs, bits, n_channels);
    double t_parallel = seconds_since(t0);
    std::printf("openmp:  %.3f s  (speedup %.2fx)\n", t_parallel, t_serial / t_parallel);

    if (!tables_identical(serial, parallel)) {
        std::printf("FAIL: serial and OpenMP sweeps disagree\n");
        return 1;
    }
    std::printf("tables bit-identical across schedules\n");
    return 0;
}
