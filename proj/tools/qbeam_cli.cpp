#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qbeam/analysis.hpp"
#include "qbeam/config_io.hpp"
#include "qbeam/csv.hpp"
#include "qbeam/eigenbeam.hpp"
#include "qbeam/harness.hpp"
#include "qbeam/quantizer.hpp"

namespace fs = std::filesystem;
using namespace qbeam;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& text, const std::string& flag) {
    try {
        size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw UsageError(flag + ": cannot parse '" + text + "' as a number");
    }
}

std::vector<double> parse_snr_list(const std::string& text) {
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts = split(text, ':');
        if (parts.size() != 3) throw UsageError("--snr: expected start:step:stop");
        double start = parse_double(parts[0], "--snr");
        double step = parse_double(parts[1], "--snr");
        double stop = parse_double(parts[2], "--snr");
        if (step <= 0.0) throw UsageError("--snr: step must be positive");
        std::vector<double> out;
        for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
        if (out.empty()) throw UsageError("--snr: empty range");
        return out;
    }
    std::vector<double> out;
    for (const std::string& p : split(text, ',')) out.push_back(parse_double(p, "--snr"));
    return out;
}

std::vector<Allocator> parse_alloc_list(const std::string& text) {
    std::vector<Allocator> out;
    for (const std::string& p : split(text, ',')) {
        try {
            out.push_back(allocator_from_name(p));
        } catch (const std::exception&) {
            throw UsageError("--alloc: unknown allocator '" + p +
                             "' (choose from eepa, aoepa, oepa, mmse)");
        }
    }
    return out;
}

std::vector<int> parse_bits_list(const std::string& text) {
    std::vector<int> out;
    for (const std::string& p : split(text, ',')) {
        if (p == "full") {
            out.push_back(0);
            continue;
        }
        try {
            size_t pos = 0;
            int b = std::stoi(p, &pos);
            if (pos != p.size() || b < 1 || b > 16) throw std::invalid_argument("range");
            out.push_back(b);
        } catch (const std::exception&) {
            throw UsageError("--bits: expected integers in 1..16 or 'full', got '" + p + "'");
        }
    }
    return out;
}

TrialMode parse_mode(const std::string& text) {
    if (text == "waveform") return TrialMode::waveform;
    if (text == "pqn") return TrialMode::pqn;
    throw UsageError("--mode: expected waveform or pqn, got '" + text + "'");
}

// Everything written by the current command; removed wholesale on failure so
// a crashed run never leaves a plausible-looking partial output directory.
struct OutputSet {
    std::vector<fs::path> files;

    void track(const fs::path& p) { files.push_back(p); }
    void discard() {
        for (const fs::path& p : files) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
};

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--config", o.config_path, "config file (flat key=value lines)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory (created if missing)");
    sub->add_option("--set", o.sets, "config override key=value (repeatable)");
    sub->add_option("--seed", o.seed, "master seed override")
        ->each([&o](const std::string&) { o.seed_given = true; });
}

SimConfig resolve_config(const CommonOpts& o) {
    SimConfig cfg;
    if (!o.config_path.empty()) cfg = parse_config_file(o.config_path);
    for (const std::string& s : o.sets) apply_override(cfg, s);
    if (o.seed_given) cfg.seed = o.seed;
    return cfg;
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

void echo_config(const fs::path& out_dir, const SimConfig& cfg, OutputSet& outputs) {
    fs::path p = out_dir / "config_resolved.txt";
    std::ofstream out(p);
    if (!out) throw std::runtime_error(p.string() + ": cannot open for writing");
    out << canonical_config_text(cfg);
    outputs.track(p);
}

int run_simulate(const CommonOpts& common, const std::string& snr_text,
                 const std::string& alloc_text, const std::string& bits_text,
                 long long trials, bool trials_given, int n_channels,
                 const std::string& mode_text) {
    std::vector<double> snrs = parse_snr_list(snr_text);
    std::vector<Allocator> allocs = parse_alloc_list(alloc_text);
    TrialMode mode = parse_mode(mode_text);
    if (n_channels < 1) throw UsageError("--channels: must be at least 1");

    SimConfig cfg = resolve_config(common);
    if (trials_given) {
        cfg.trials = trials;
        validate(cfg);
    }
    std::vector<int> bits = bits_text.empty() ? std::vector<int>{cfg.adc_bits}
                                              : parse_bits_list(bits_text);

    fs::path out_dir = prepare_out_dir(common.out_dir);
    OutputSet outputs;
    try {
        echo_config(out_dir, cfg, outputs);

        SweepOptions opts;
        opts.mode = mode;
        ResultTable table = sweep(cfg, snrs, allocs, bits, n_channels, opts);

        fs::path results = out_dir / "results.csv";
        write_results_csv(results.string(), table);
        outputs.track(results);

        fs::path plot = out_dir / "plotdata.csv";
        write_plotdata_csv(plot.string(), table);
        outputs.track(plot);
    } catch (...) {
        outputs.discard();
        throw;
    }
    return 0;
}

int run_allocate(const CommonOpts& common, const std::string& snr_text,
                 const std::string& alloc_text, const std::string& bits_text) {
    std::vector<double> snrs = parse_snr_list(snr_text);
    std::vector<Allocator> allocs = parse_alloc_list(alloc_text);
    if (snrs.size() != 1) throw UsageError("allocate: --snr takes a single value");
    if (allocs.size() != 1) throw UsageError("allocate: --alloc takes a single allocator");

    SimConfig cfg = resolve_config(common);
    if (!bits_text.empty()) {
        std::vector<int> bits = parse_bits_list(bits_text);
        if (bits.size() != 1) throw UsageError("allocate: --bits takes a single value");
        cfg.adc_bits = bits[0];
        validate(cfg);
    }

    fs::path out_dir = prepare_out_dir(common.out_dir);
    OutputSet outputs;
    try {
        echo_config(out_dir, cfg, outputs);

        DiscreteChannel channel = sweep_channel(cfg, 0);
        EigenModes modes = eigen_decompose(assemble_freq_channel(channel, cfg.n_subcarriers));
        double xi2 = std::pow(10.0, -snrs[0] / 10.0);
        ModeAllocation alloc = allocate_power(cfg, allocs[0], modes.flat_gains(), xi2);

        std::vector<AllocationRow> rows(modes.flat.size());
        for (size_t k = 0; k < modes.flat.size(); ++k) {
            rows[k].mode_index = static_cast<int>(k);
            rows[k].subcarrier = modes.flat[k].subcarrier;
            rows[k].stream = modes.flat[k].stream;
            rows[k].singular_value = modes.flat[k].gain;
            rows[k].power = alloc.p[k];
        }
        fs::path path = out_dir / "allocation.csv";
        write_allocation_csv(path.string(), config_fingerprint(cfg), rows);
        outputs.track(path);
    } catch (...) {
        outputs.discard();
        throw;
    }
    return 0;
}

int run_analyze(const CommonOpts& common, const std::string& snr_text,
                const std::string& alloc_text, const std::string& bits_text, int n_channels) {
    std::vector<double> snrs = parse_snr_list(snr_text);
    std::vector<Allocator> allocs = parse_alloc_list(alloc_text);
    if (n_channels < 1) throw UsageError("--channels: must be at least 1");

    SimConfig cfg = resolve_config(common);
    std::vector<int> bits = bits_text.empty() ? std::vector<int>{cfg.adc_bits}
                                              : parse_bits_list(bits_text);

    fs::path out_dir = prepare_out_dir(common.out_dir);
    OutputSet outputs;
    try {
        echo_config(out_dir, cfg, outputs);

        std::vector<RealVec> gains(n_channels);
        for (int m = 0; m < n_channels; ++m) {
            DiscreteChannel channel = sweep_channel(cfg, m);
            gains[m] = eigen_decompose(assemble_freq_channel(channel, cfg.n_subcarriers))
                           .flat_gains();
        }

        std::vector<PredictionRow> rows;
        for (Allocator alloc : allocs) {
            for (int b : bits) {
                SimConfig cell_cfg = cfg;
                cell_cfg.adc_bits = b;
                for (double snr : snrs) {
                    double xi2 = std::pow(10.0, -snr / 10.0);
                    PredictionRow row;
                    row.alloc = alloc;
                    row.adc_bits = b;
                    row.snr_db = snr;
                    for (int m = 0; m < n_channels; ++m) {
                        ModeAllocation pa = allocate_power(cell_cfg, alloc, gains[m], xi2);
                        BerPrediction pred =
                            analytic_uncoded_ber(pa.p, gains[m], xi2, cfg.qam_order, b,
                                                 cfg.agc_alpha);
                        double c = pqn_c(b, cfg.agc_alpha, PqnForm::exact);
                        RealVec eff(gains[m].size());
                        for (int k = 0; k < gains[m].size(); ++k)
                            eff[k] = std::sqrt(pa.p[k]) * gains[m][k];
                        row.surrogate += pred.s / n_channels;
                        row.ber_analytic += pred.ber / n_channels;
                        row.mse_analytic += mse_diag(eff, xi2, pqn_xi_q2(c, pa.p, gains[m]),
                                                     static_cast<int>(gains[m].size())) /
                                            n_channels;
                        row.converged = row.converged && pa.converged;
                    }
                    rows.push_back(row);
                }
            }
        }
        std::sort(rows.begin(), rows.end(), [](const PredictionRow& x, const PredictionRow& y) {
            std::string xn = allocator_name(x.alloc), yn = allocator_name(y.alloc);
            if (xn != yn) return xn < yn;
            if (x.adc_bits != y.adc_bits) return x.adc_bits < y.adc_bits;
            return x.snr_db < y.snr_db;
        });

        fs::path path = out_dir / "predictions.csv";
        write_predictions_csv(path.string(), config_fingerprint(cfg), rows);
        outputs.track(path);
    } catch (...) {
        outputs.discard();
        throw;
    }
    return 0;
}

int run_channel(const CommonOpts& common, int n_channels) {
    if (n_channels < 1) throw UsageError("--channels: must be at least 1");
    SimConfig cfg = resolve_config(common);

    fs::path out_dir = prepare_out_dir(common.out_dir);
    OutputSet outputs;
    try {
        echo_config(out_dir, cfg, outputs);
        std::uint64_t fp = config_fingerprint(cfg);
        for (int m = 0; m < n_channels; ++m) {
            char name[32];
            std::snprintf(name, sizeof(name), "channel_%03d.csv", m);
            fs::path path = out_dir / name;
            write_channel_csv(path.string(), fp, sweep_channel(cfg, m));
            outputs.track(path);
        }
    } catch (...) {
        outputs.discard();
        throw;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MIMO-OFDM eigenbeam link simulator with low-resolution ADC receivers"};
    app.require_subcommand(1);

    CommonOpts sim_common, alloc_common, ana_common, chan_common;
    std::string sim_snr = "10:5:40", sim_alloc = "aoepa", sim_bits, sim_mode = "waveform";
    long long sim_trials = 0;
    int sim_channels = 10;
    std::string alc_snr = "20", alc_alloc = "aoepa", alc_bits;
    std::string ana_snr = "10:5:40", ana_alloc = "aoepa", ana_bits;
    int ana_channels = 10;
    int chan_count = 1;

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo BER/MSE sweep");
    add_common(simulate, sim_common);
    simulate->add_option("--snr", sim_snr, "SNR list in dB: comma list or start:step:stop");
    simulate->add_option("--alloc", sim_alloc, "allocator list: eepa,aoepa,oepa,mmse");
    simulate->add_option("--bits", sim_bits, "ADC precision list: 1..16 or full");
    CLI::Option* trials_opt =
        simulate->add_option("--trials", sim_trials, "OFDM symbols per cell");
    simulate->add_option("--channels", sim_channels, "channel realizations");
    simulate->add_option("--mode", sim_mode, "waveform or pqn");

    CLI::App* allocate = app.add_subcommand("allocate", "per-mode power allocation dump");
    add_common(allocate, alloc_common);
    allocate->add_option("--snr", alc_snr, "single SNR in dB");
    allocate->add_option("--alloc", alc_alloc, "single allocator");
    allocate->add_option("--bits", alc_bits, "single ADC precision (1..16 or full)");

    CLI::App* analyze = app.add_subcommand("analyze", "analytic BER/MSE without Monte Carlo");
    add_common(analyze, ana_common);
    analyze->add_option("--snr", ana_snr, "SNR list in dB: comma list or start:step:stop");
    analyze->add_option("--alloc", ana_alloc, "allocator list: eepa,aoepa,oepa,mmse");
    analyze->add_option("--bits", ana_bits, "ADC precision list: 1..16 or full");
    analyze->add_option("--channels", ana_channels, "channel realizations to average");

    CLI::App* channel = app.add_subcommand("channel", "write channel fixture CSVs");
    add_common(channel, chan_common);
    channel->add_option("--channels", chan_count, "number of fixtures to write");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(simulate))
            return run_simulate(sim_common, sim_snr, sim_alloc, sim_bits, sim_trials,
                                trials_opt->count() > 0, sim_channels, sim_mode);
        if (app.got_subcommand(allocate))
            return run_allocate(alloc_common, alc_snr, alc_alloc, alc_bits);
        if (app.got_subcommand(analyze))
            return run_analyze(ana_common, ana_snr, ana_alloc, ana_bits, ana_channels);
        return run_channel(chan_common, chan_count);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
