#include "qbeam/harness.hpp"

#include <algorithm>

#include "qbeam/analysis.hpp"
#include "qbeam/config_io.hpp"
#include "qbeam/linkmodel.hpp"
#include "qbeam/poweralloc.hpp"
#include "qbeam/quantizer.hpp"

namespace qbeam {

namespace {

constexpr std::uint64_t kChannelStream = 0x100000000ULL;
constexpr std::uint64_t kCellStream = 0x200000000ULL;

}  // namespace

ModeAllocation allocate_power(const SimConfig& cfg, Allocator alloc, const RealVec& gains,
                              double xi2, PqnForm pqn) {
    double budget = static_cast<double>(cfg.n_subcarriers) * cfg.n_streams();
    int count = static_cast<int>(gains.size());
    ModeAllocation out;
    switch (alloc) {
        case Allocator::eepa:
            out.p = eepa(count, budget);
            break;
        case Allocator::aoepa:
            out.p = aoepa(gains, xi2, cfg.qam_order, budget);
            break;
        case Allocator::mmse: {
            RealVec amp = mmse_pa(gains, budget);
            out.p = amp.cwiseProduct(amp);
            break;
        }
        case Allocator::oepa: {
            OepaOptions opts;
            opts.pqn = pqn;
            AllocResult res = oepa(gains, xi2, cfg.qam_order, cfg.adc_bits, cfg.agc_alpha,
                                   budget, opts);
            out.p = res.p;
            out.converged = res.converged;
            break;
        }
    }
    return out;
}

DiscreteChannel sweep_channel(const SimConfig& cfg, int index) {
    int l_taps = std::max(1, cfg.l_cp);
    return realize_channel(cfg.sv, l_taps, cfg.n_r, cfg.n_t,
                           derive_stream_seed(cfg.seed, kChannelStream + index));
}

TrialResult run_trial(const SimConfig& cfg, const DiscreteChannel& channel, Allocator alloc,
                      double snr_db, std::uint64_t seed, TrialMode mode,
                      const SweepOptions& opts) {
    double xi2 = std::pow(10.0, -snr_db / 10.0);

    FreqChannel fc = assemble_freq_channel(channel, cfg.n_subcarriers);
    EigenModes modes = eigen_decompose(fc);
    RealVec gains = modes.flat_gains();
    int n_modes = modes.mode_count();
    int m_bits = bits_per_symbol(cfg.qam_order);

    ModeAllocation alloc_res = allocate_power(cfg, alloc, gains, xi2, opts.pqn);
    const RealVec& p = alloc_res.p;

    double c = pqn_c(cfg.adc_bits, cfg.agc_alpha, opts.pqn);
    double xi_q2 = pqn_xi_q2(c, p, gains);

    TrialResult res;
    res.alloc = alloc;
    res.adc_bits = cfg.adc_bits;
    res.snr_db = snr_db;
    res.channel_seed = seed;
    res.converged = alloc_res.converged;
    res.ber_analytic = analytic_uncoded_ber(p, gains, xi2, cfg.qam_order, cfg.adc_bits,
                                            cfg.agc_alpha, opts.pqn, opts.ber)
                           .ber;
    RealVec effective(n_modes);
    for (int k = 0; k < n_modes; ++k) effective[k] = std::sqrt(p[k]) * gains[k];
    res.mse_analytic = mse_diag(effective, xi2, xi_q2, n_modes);

    BeamformerPair beams = build_beamformers(modes, p);
    AdcModel adc;
    adc.bits = cfg.adc_bits;
    adc.alpha = cfg.agc_alpha;
    if (!cfg.full_precision()) {
        double signal = 0.0;
        for (int k = 0; k < n_modes; ++k) signal += p[k] * gains[k] * gains[k];
        double expected_rx =
            signal + static_cast<double>(cfg.n_subcarriers) * cfg.n_r * xi2;
        adc.gain = agc_gain(expected_rx, cfg.n_subcarriers, cfg.n_r, cfg.agc_alpha);
    }

    double noise_var = (c + 1.0) * xi2 + xi_q2;  // pqn-mode effective noise per mode
    double mse_acc = 0.0;
    std::vector<std::uint8_t> bits(static_cast<size_t>(n_modes) * m_bits);

    for (long long frame = 0; frame < cfg.trials; ++frame) {
        Rng bit_rng(derive_stream_seed(seed, 2 * static_cast<std::uint64_t>(frame)));
        std::uint64_t noise_seed = derive_stream_seed(seed, 2 * static_cast<std::uint64_t>(frame) + 1);

        for (auto& b : bits) b = bit_rng.uniform() < 0.5 ? 0 : 1;
        ComplexVec x = qam_modulate(bits, cfg.qam_order);

        ComplexVec xhat;
        if (mode == TrialMode::waveform) {
            ComplexVec v = simulate_waveform_link(channel, beams, x, xi2,
                                                  cfg.full_precision() ? nullptr : &adc,
                                                  noise_seed);
            xhat = combine_received(beams, v);
        } else {
            Rng noise_rng(noise_seed);
            double sigma = std::sqrt(noise_var);
            xhat.resize(n_modes);
            for (int k = 0; k < n_modes; ++k)
                xhat[k] = effective[k] * x[k] + sigma * noise_rng.cgauss();
        }

        mse_acc += (xhat - x).squaredNorm();

        ComplexVec equalized(n_modes);
        for (int k = 0; k < n_modes; ++k)
            equalized[k] = effective[k] > 0.0 ? xhat[k] / effective[k] : cplx(0.0, 0.0);
        std::vector<std::uint8_t> rx_bits = qam_demodulate(equalized, cfg.qam_order);

        for (size_t i = 0; i < bits.size(); ++i)
            if (bits[i] != rx_bits[i]) ++res.bit_errors;
        res.bits_sent += static_cast<long long>(bits.size());
        res.trials = frame + 1;
        if (res.bit_errors >= opts.error_stop) break;
    }

    res.ber_mc = res.bits_sent > 0 ? static_cast<double>(res.bit_errors) / res.bits_sent : 0.0;
    res.ber_stderr = res.bits_sent > 0
                         ? std::sqrt(res.ber_mc * (1.0 - res.ber_mc) / res.bits_sent)
                         : 0.0;
    res.mse_mc = res.trials > 0 ? mse_acc / res.trials : 0.0;
    return res;
}

namespace {

ResultTable sweep_impl(const SimConfig& cfg, const std::vector<double>& snr_db,
                       const std::vector<Allocator>& allocators,
                       const std::vector<int>& adc_bits, int n_channels,
                       const SweepOptions& opts) {
    validate(cfg);
    if (snr_db.empty() || allocators.empty() || adc_bits.empty() || n_channels < 1)
        throw std::invalid_argument("sweep: empty sweep axis");

    std::vector<DiscreteChannel> channels(n_channels);
    for (int m = 0; m < n_channels; ++m) channels[m] = sweep_channel(cfg, m);

    const size_t n_alloc = allocators.size();
    const size_t n_bits = adc_bits.size();
    const size_t n_snr = snr_db.size();
    const size_t n_cells = static_cast<size_t>(n_channels) * n_alloc * n_bits * n_snr;
    std::vector<TrialResult> cells(n_cells);

#pragma omp parallel for schedule(dynamic) if (opts.parallel)
    for (long long idx = 0; idx < static_cast<long long>(n_cells); ++idx) {
        size_t rest = static_cast<size_t>(idx);
        size_t s = rest % n_snr; rest /= n_snr;
        size_t b = rest % n_bits; rest /= n_bits;
        size_t a = rest % n_alloc; rest /= n_alloc;
        size_t ch = rest;

        SimConfig cell_cfg = cfg;
        cell_cfg.adc_bits = adc_bits[b];
        std::uint64_t cell_seed = derive_stream_seed(cfg.seed, kCellStream + idx);
        cells[idx] = run_trial(cell_cfg, channels[ch], allocators[a], snr_db[s], cell_seed,
                               opts.mode, opts);
    }

    ResultTable table;
    table.fingerprint = config_fingerprint(cfg);
    for (size_t a = 0; a < n_alloc; ++a) {
        for (size_t b = 0; b < n_bits; ++b) {
            for (size_t s = 0; s < n_snr; ++s) {
                TrialResult row;
                row.alloc = allocators[a];
                row.adc_bits = adc_bits[b];
                row.snr_db = snr_db[s];
                row.channel_seed = cfg.seed;
                double an_acc = 0.0, mse_an_acc = 0.0, mse_mc_acc = 0.0;
                for (int ch = 0; ch < n_channels; ++ch) {
                    size_t idx = ((static_cast<size_t>(ch) * n_alloc + a) * n_bits + b) * n_snr + s;
                    const TrialResult& cell = cells[idx];
                    row.trials += cell.trials;
                    row.bits_sent += cell.bits_sent;
                    row.bit_errors += cell.bit_errors;
                    row.converged = row.converged && cell.converged;
                    an_acc += cell.ber_analytic * cell.bits_sent;
                    mse_an_acc += cell.mse_analytic * cell.trials;
                    mse_mc_acc += cell.mse_mc * cell.trials;
                }
                row.ber_mc = row.bits_sent > 0
                                 ? static_cast<double>(row.bit_errors) / row.bits_sent
                                 : 0.0;
                row.ber_stderr = row.bits_sent > 0
                                     ? std::sqrt(row.ber_mc * (1.0 - row.ber_mc) / row.bits_sent)
                                     : 0.0;
                row.ber_analytic = row.bits_sent > 0 ? an_acc / row.bits_sent : 0.0;
                row.mse_analytic = row.trials > 0 ? mse_an_acc / row.trials : 0.0;
                row.mse_mc = row.trials > 0 ? mse_mc_acc / row.trials : 0.0;
                table.rows.push_back(row);
            }
        }
    }

    std::sort(table.rows.begin(), table.rows.end(), [](const TrialResult& x, const TrialResult& y) {
        std::string xn = allocator_name(x.alloc), yn = allocator_name(y.alloc);
        if (xn != yn) return xn < yn;
        if (x.adc_bits != y.adc_bits) return x.adc_bits < y.adc_bits;
        return x.snr_db < y.snr_db;
    });
    return table;
}

}  // namespace

ResultTable sweep(const SimConfig& cfg, const std::vector<double>& snr_db,
                  const std::vector<Allocator>& allocators, const std::vector<int>& adc_bits,
                  int n_channels, const SweepOptions& opts) {
    return sweep_impl(cfg, snr_db, allocators, adc_bits, n_channels, opts);
}

ResultTable sweep_serial(const SimConfig& cfg, const std::vector<double>& snr_db,
                         const std::vector<Allocator>& allocators,
                         const std::vector<int>& adc_bits, int n_channels,
                         const SweepOptions& opts) {
    SweepOptions serial = opts;
    serial.parallel = false;
    return sweep_impl(cfg, snr_db, allocators, adc_bits, n_channels, serial);
}

}  // namespace qbeam
