#include "qbeam/csv.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qbeam/config_io.hpp"

namespace qbeam {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fingerprint_hex(std::uint64_t fp) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fp);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    return out;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

void write_results_csv(const std::string& path, const ResultTable& table) {
    std::ofstream out = open_out(path);
    out << "config_hash,allocator,adc_bits,snr_db,trials,bits_sent,bit_errors,"
           "ber_mc,ber_stderr,ber_analytic,mse_mc,mse_analytic,converged\n";
    std::string hash = fingerprint_hex(table.fingerprint);
    for (const TrialResult& r : table.rows) {
        out << hash << ',' << allocator_name(r.alloc) << ',' << adc_bits_label(r.adc_bits)
            << ',' << format_double(r.snr_db) << ',' << r.trials << ',' << r.bits_sent << ','
            << r.bit_errors << ',' << format_double(r.ber_mc) << ','
            << format_double(r.ber_stderr) << ',' << format_double(r.ber_analytic) << ','
            << format_double(r.mse_mc) << ',' << format_double(r.mse_analytic) << ','
            << (r.converged ? 1 : 0) << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

void write_plotdata_csv(const std::string& path, const ResultTable& table) {
    std::vector<double> snrs;
    std::vector<std::string> series;
    std::map<std::string, std::map<double, double>> ber;
    for (const TrialResult& r : table.rows) {
        std::string name = std::string(allocator_name(r.alloc)) + "_" +
                           adc_bits_label(r.adc_bits);
        if (ber.find(name) == ber.end()) series.push_back(name);
        ber[name][r.snr_db] = r.ber_mc;
        if (std::find(snrs.begin(), snrs.end(), r.snr_db) == snrs.end())
            snrs.push_back(r.snr_db);
    }
    std::sort(snrs.begin(), snrs.end());

    std::ofstream out = open_out(path);
    out << "config_hash,snr_db";
    for (const std::string& name : series) out << ',' << "ber_" << name;
    out << '\n';
    std::string hash = fingerprint_hex(table.fingerprint);
    for (double snr : snrs) {
        out << hash << ',' << format_double(snr);
        for (const std::string& name : series) {
            auto it = ber[name].find(snr);
            out << ',' << (it == ber[name].end() ? "nan" : format_double(it->second));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

void write_allocation_csv(const std::string& path, std::uint64_t fingerprint,
                          const std::vector<AllocationRow>& rows) {
    double total = 0.0;
    for (const AllocationRow& r : rows) total += r.power;

    std::ofstream out = open_out(path);
    out << "config_hash,mode_index,subcarrier,stream,singular_value,power,power_sum\n";
    std::string hash = fingerprint_hex(fingerprint);
    std::string total_str = format_double(total);
    for (const AllocationRow& r : rows) {
        out << hash << ',' << r.mode_index << ',' << r.subcarrier << ',' << r.stream << ','
            << format_double(r.singular_value) << ',' << format_double(r.power) << ','
            << total_str << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

void write_predictions_csv(const std::string& path, std::uint64_t fingerprint,
                           const std::vector<PredictionRow>& rows) {
    std::ofstream out = open_out(path);
    out << "config_hash,allocator,adc_bits,snr_db,ber_surrogate,ber_analytic,mse_analytic,"
           "converged\n";
    std::string hash = fingerprint_hex(fingerprint);
    for (const PredictionRow& r : rows) {
        out << hash << ',' << allocator_name(r.alloc) << ',' << adc_bits_label(r.adc_bits)
            << ',' << format_double(r.snr_db) << ',' << format_double(r.surrogate) << ','
            << format_double(r.ber_analytic) << ',' << format_double(r.mse_analytic) << ','
            << (r.converged ? 1 : 0) << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

void write_channel_csv(const std::string& path, std::uint64_t fingerprint,
                       const DiscreteChannel& channel) {
    std::ofstream out = open_out(path);
    out << "config_hash,tap";
    for (int j = 0; j < channel.n_r; ++j)
        for (int i = 0; i < channel.n_t; ++i)
            out << ",h_" << j << '_' << i << "_re,h_" << j << '_' << i << "_im";
    out << '\n';
    std::string hash = fingerprint_hex(fingerprint);
    for (int t = 0; t < channel.l_taps; ++t) {
        out << hash << ',' << t;
        for (int j = 0; j < channel.n_r; ++j) {
            for (int i = 0; i < channel.n_t; ++i) {
                cplx h = channel.pair(j, i)[t];
                out << ',' << format_double(h.real()) << ',' << format_double(h.imag());
            }
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

DiscreteChannel read_channel_csv(const std::string& path, std::uint64_t* fingerprint) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open for reading");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    std::vector<std::string> header = split_line(line);
    if (header.size() < 4 || header[0] != "config_hash" || header[1] != "tap")
        throw std::runtime_error(path + ": not a channel fixture");

    int n_r = 0, n_t = 0;
    for (size_t col = 2; col < header.size(); col += 2) {
        int j = 0, i = 0;
        char kind[3] = {0};
        if (std::sscanf(header[col].c_str(), "h_%d_%d_%2s", &j, &i, kind) != 3 ||
            std::string(kind) != "re")
            throw std::runtime_error(path + ": malformed column " + header[col]);
        n_r = std::max(n_r, j + 1);
        n_t = std::max(n_t, i + 1);
    }
    size_t expected_cols = 2 + 2 * static_cast<size_t>(n_r) * n_t;
    if (header.size() != expected_cols)
        throw std::runtime_error(path + ": incomplete antenna-pair columns");

    std::vector<std::vector<cplx>> taps(static_cast<size_t>(n_r) * n_t);
    bool first_row = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields = split_line(line);
        if (fields.size() != expected_cols)
            throw std::runtime_error(path + ": row has wrong field count");
        if (first_row && fingerprint) {
            *fingerprint = std::stoull(fields[0], nullptr, 16);
            first_row = false;
        }
        for (int j = 0; j < n_r; ++j) {
            for (int i = 0; i < n_t; ++i) {
                size_t col = 2 + 2 * (static_cast<size_t>(j) * n_t + i);
                taps[static_cast<size_t>(j) * n_t + i].emplace_back(
                    std::stod(fields[col]), std::stod(fields[col + 1]));
            }
        }
    }
    if (taps[0].empty()) throw std::runtime_error(path + ": no tap rows");

    DiscreteChannel ch;
    ch.n_r = n_r;
    ch.n_t = n_t;
    ch.l_taps = static_cast<int>(taps[0].size());
    ch.h.resize(taps.size());
    for (size_t p = 0; p < taps.size(); ++p) {
        ch.h[p].resize(ch.l_taps);
        for (int t = 0; t < ch.l_taps; ++t) ch.h[p][t] = taps[p][t];
    }
    return ch;
}

}  // namespace qbeam
