#pragma once

#include <vector>

#include "qbeam/core.hpp"
#include "qbeam/eigenbeam.hpp"
#include "qbeam/svchannel.hpp"

namespace qbeam {

enum class TrialMode { waveform, pqn };

struct TrialResult {
    Allocator alloc = Allocator::eepa;
    int adc_bits = 0;
    double snr_db = 0.0;
    long long trials = 0;  // OFDM symbols actually run
    long long bits_sent = 0;
    long long bit_errors = 0;
    double ber_mc = 0.0;
    double ber_stderr = 0.0;
    double ber_analytic = 0.0;
    double mse_mc = 0.0;
    double mse_analytic = 0.0;
    std::uint64_t channel_seed = 0;
    bool converged = true;
};

struct ResultTable {
    std::vector<TrialResult> rows;  // sorted by (allocator, adc_bits, snr_db)
    std::uint64_t fingerprint = 0;
};

struct SweepOptions {
    TrialMode mode = TrialMode::waveform;
    bool parallel = true;
    PqnForm pqn = PqnForm::exact;
    BerForm ber = BerForm::exact;
    long long error_stop = 200;  // stop a cell once this many bit errors accumulate
};

struct ModeAllocation {
    RealVec p;
    bool converged = true;
};

// Allocator dispatch with the config's budget N * min(n_t, n_r) and the
// modulation/ADC parameters the iterative allocator needs.
ModeAllocation allocate_power(const SimConfig& cfg, Allocator alloc, const RealVec& gains,
                              double xi2, PqnForm pqn = PqnForm::exact);

// Channel realization `index` of the ensemble sweep uses for this config
// (l_taps = max(1, l_cp), one derived seed per realization).
DiscreteChannel sweep_channel(const SimConfig& cfg, int index);

// One measurement cell: fixed channel, allocator, precision and SNR, up to
// config.trials OFDM symbols with early stopping. snr_db defines
// xi2 = 10^(-snr_db / 10). The config's adc_bits field is used as-is.
TrialResult run_trial(const SimConfig& cfg, const DiscreteChannel& channel, Allocator alloc,
                      double snr_db, std::uint64_t seed, TrialMode mode,
                      const SweepOptions& opts = {});

// Cartesian sweep over (channel, allocator, adc_bits, snr). Channels get
// independent derived seeds; cells run independently (OpenMP when
// opts.parallel) and are pooled, weighted by bits, into one row per
// (allocator, adc_bits, snr).
ResultTable sweep(const SimConfig& cfg, const std::vector<double>& snr_db,
                  const std::vector<Allocator>& allocators, const std::vector<int>& adc_bits,
                  int n_channels, const SweepOptions& opts = {});

// Same cells, plain loop. Must produce a bit-identical ResultTable.
ResultTable sweep_serial(const SimConfig& cfg, const std::vector<double>& snr_db,
                         const std::vector<Allocator>& allocators,
                         const std::vector<int>& adc_bits, int n_channels,
                         const SweepOptions& opts = {});

}  // namespace qbeam
