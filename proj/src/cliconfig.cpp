#include "qbeam/config_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace qbeam {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, int line, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, line, "expected a number, got '" + value + "'");
    }
}

long long parse_int(const std::string& key, int line, const std::string& value) {
    try {
        size_t pos = 0;
        long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, line, "expected an integer, got '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, int line, const std::string& value) {
    try {
        size_t pos = 0;
        std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, line, "expected an unsigned integer, got '" + value + "'");
    }
}

void set_key(SimConfig& cfg, const std::string& key, const std::string& value, int line) {
    if (key == "n_T") cfg.n_t = static_cast<int>(parse_int(key, line, value));
    else if (key == "n_R") cfg.n_r = static_cast<int>(parse_int(key, line, value));
    else if (key == "N") cfg.n_subcarriers = static_cast<int>(parse_int(key, line, value));
    else if (key == "L_cp") cfg.l_cp = static_cast<int>(parse_int(key, line, value));
    else if (key == "M") cfg.qam_order = static_cast<int>(parse_int(key, line, value));
    else if (key == "noise_variance") cfg.noise_variance = parse_double(key, line, value);
    else if (key == "adc_bits") {
        if (value == "full") cfg.adc_bits = 0;
        else cfg.adc_bits = static_cast<int>(parse_int(key, line, value));
    }
    else if (key == "agc_alpha") cfg.agc_alpha = parse_double(key, line, value);
    else if (key == "trials") cfg.trials = parse_int(key, line, value);
    else if (key == "seed") cfg.seed = parse_u64(key, line, value);
    else if (key == "Lambda") cfg.sv.Lambda = parse_double(key, line, value);
    else if (key == "lambda") cfg.sv.lambda = parse_double(key, line, value);
    else if (key == "Gamma") cfg.sv.Gamma = parse_double(key, line, value);
    else if (key == "gamma") cfg.sv.gamma = parse_double(key, line, value);
    else if (key == "sigma_c") cfg.sv.sigma_c = parse_double(key, line, value);
    else if (key == "sigma_r") cfg.sv.sigma_r = parse_double(key, line, value);
    else if (key == "L_c") cfg.sv.mean_clusters = parse_double(key, line, value);
    else if (key == "L_r") cfg.sv.mean_rays = parse_double(key, line, value);
    else if (key == "sample_period") cfg.sv.sample_period = parse_double(key, line, value);
    else throw ConfigError(key, line, "unknown key");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("", line_no, "expected key=value, got '" + trim(raw) + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        set_key(cfg, key, value, line_no);
    }
    try {
        validate(cfg);
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        size_t colon = msg.find(':');
        std::string key = colon == std::string::npos ? "" : msg.substr(0, colon);
        throw ConfigError(key, 0, colon == std::string::npos ? msg : trim(msg.substr(colon + 1)));
    }
    return cfg;
}

SimConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", 0, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void apply_override(SimConfig& cfg, const std::string& assignment) {
    size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("", 0, "override must be key=value: '" + assignment + "'");
    std::string key = trim(assignment.substr(0, eq));
    std::string value = trim(assignment.substr(eq + 1));
    set_key(cfg, key, value, 0);
    try {
        validate(cfg);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key, 0, e.what());
    }
}

std::string canonical_config_text(const SimConfig& cfg) {
    std::map<std::string, std::string> kv;
    kv["n_T"] = std::to_string(cfg.n_t);
    kv["n_R"] = std::to_string(cfg.n_r);
    kv["N"] = std::to_string(cfg.n_subcarriers);
    kv["L_cp"] = std::to_string(cfg.l_cp);
    kv["M"] = std::to_string(cfg.qam_order);
    kv["noise_variance"] = format_double(cfg.noise_variance);
    kv["adc_bits"] = adc_bits_label(cfg.adc_bits);
    kv["agc_alpha"] = format_double(cfg.agc_alpha);
    kv["trials"] = std::to_string(cfg.trials);
    kv["seed"] = std::to_string(cfg.seed);
    kv["Lambda"] = format_double(cfg.sv.Lambda);
    kv["lambda"] = format_double(cfg.sv.lambda);
    kv["Gamma"] = format_double(cfg.sv.Gamma);
    kv["gamma"] = format_double(cfg.sv.gamma);
    kv["sigma_c"] = format_double(cfg.sv.sigma_c);
    kv["sigma_r"] = format_double(cfg.sv.sigma_r);
    kv["L_c"] = format_double(cfg.sv.mean_clusters);
    kv["L_r"] = format_double(cfg.sv.mean_rays);
    kv["sample_period"] = format_double(cfg.sv.sample_period);

    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t config_fingerprint(const SimConfig& cfg) {
    std::string text = canonical_config_text(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string adc_bits_label(int bits) {
    return bits == 0 ? "full" : std::to_string(bits);
}

}  // namespace qbeam
