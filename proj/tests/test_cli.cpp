#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "qbeam/config_io.hpp"
#include "qbeam/csv.hpp"
#include "qbeam/harness.hpp"

using namespace qbeam;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() /
                   ("qbeam_cli_" + std::to_string(getpid()) + "_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& stderr_file = {}) {
    std::string cmd = std::string(QBEAM_CLI_PATH) + " " + args + " >/dev/null";
    cmd += stderr_file.empty() ? " 2>/dev/null" : " 2>" + stderr_file.string();
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

std::vector<std::vector<std::string>> data_rows(const fs::path& csv) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream ss(slurp(csv));
    std::string line;
    bool header = true;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        rows.push_back(split(line));
    }
    return rows;
}

const std::string kSmallConfig =
    "N=16\nL_cp=4\nsample_period=12.8\ntrials=20\nseed=5\n";

}  // namespace

TEST_CASE("cli echoes the resolved configuration") {
    fs::path dir = fresh_dir("echo");
    fs::path cfg = dir / "empty.cfg";
    write_file(cfg, "");

    int code = run_cli("channel --config " + cfg.string() + " --out " + (dir / "out").string());
    CHECK(code == 0);

    std::string echoed = slurp(dir / "out" / "config_resolved.txt");
    CHECK(echoed.find("N=512") != std::string::npos);
    CHECK(echoed.find("adc_bits=full") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "channel_000.csv"));

    // the echo reparses to the identical configuration
    SimConfig parsed = parse_config_text(echoed);
    CHECK(parsed.sv.Lambda == 0.037);
    CHECK(config_fingerprint(parsed) == config_fingerprint(SimConfig{}));
}

TEST_CASE("cli overrides reach the resolved configuration") {
    fs::path dir = fresh_dir("override");
    fs::path cfg = dir / "base.cfg";
    write_file(cfg, kSmallConfig);

    int code = run_cli("channel --config " + cfg.string() + " --set adc_bits=3 --out " +
                       (dir / "out").string());
    CHECK(code == 0);
    std::string echoed = slurp(dir / "out" / "config_resolved.txt");
    CHECK(echoed.find("adc_bits=3") != std::string::npos);
    CHECK(echoed.find("N=16") != std::string::npos);
}

TEST_CASE("cli rejects invalid configuration values with exit code 2") {
    fs::path dir = fresh_dir("badcfg");
    fs::path cfg = dir / "base.cfg";
    write_file(cfg, kSmallConfig);
    fs::path err = dir / "stderr.txt";

    int code = run_cli("simulate --config " + cfg.string() + " --set N=500 --snr 10 --out " +
                           (dir / "out").string(),
                       err);
    CHECK(code == 2);
    CHECK(slurp(err).find("N") != std::string::npos);
}

TEST_CASE("cli rejects unknown allocators with exit code 1") {
    fs::path dir = fresh_dir("badalloc");
    fs::path cfg = dir / "base.cfg";
    write_file(cfg, kSmallConfig);
    int code = run_cli("simulate --config " + cfg.string() + " --alloc waterfill --out " +
                       (dir / "out").string());
    CHECK(code == 1);
}

TEST_CASE("repeated simulate runs write byte-identical results") {
    fs::path dir = fresh_dir("repeat");
    fs::path cfg = dir / "base.cfg";
    write_file(cfg, kSmallConfig);

    std::string common = "simulate --config " + cfg.string() +
                         " --snr 10,20 --alloc eepa,aoepa --bits 2,full --channels 2 --out ";
    CHECK(run_cli(common + (dir / "a").string()) == 0);
    CHECK(run_cli(common + (dir / "b").string()) == 0);

    std::string a = slurp(dir / "a" / "results.csv");
    CHECK(a == slurp(dir / "b" / "results.csv"));
    CHECK(a.rfind("config_hash,allocator,adc_bits,snr_db,trials,bits_sent,bit_errors,ber_mc,"
                  "ber_stderr,ber_analytic,mse_mc,mse_analytic,converged",
                  0) == 0);
    CHECK(data_rows(dir / "a" / "results.csv").size() == 8);
    CHECK(fs::exists(dir / "a" / "plotdata.csv"));
}

TEST_CASE("allocation output satisfies the budget checksum") {
    fs::path dir = fresh_dir("alloc");
    fs::path cfg = dir / "base.cfg";
    write_file(cfg, kSmallConfig);

    CHECK(run_cli("allocate --config " + cfg.string() + " --snr 20 --alloc aoepa --out " +
                  (dir / "out").string()) == 0);

    auto rows = data_rows(dir / "out" / "allocation.csv");
    REQUIRE(!rows.empty());
    double total = 0.0;
    for (const auto& row : rows) {
        REQUIRE(row.size() == 7);
        total += std::stod(row[5]);
        CHECK(std::stod(row[6]) == doctest::Approx(16.0 * 2).epsilon(1e-9));
    }
    CHECK(total == doctest::Approx(16.0 * 2).epsilon(1e-9));
}

TEST_CASE("analyze emits one prediction row per grid point with a stable hash") {
    fs::path dir = fresh_dir("analyze");
    fs::path cfg = dir / "base.cfg";
    write_file(cfg, kSmallConfig);

    CHECK(run_cli("analyze --config " + cfg.string() +
                  " --snr 10,20,30 --alloc aoepa --bits 3 --channels 2 --out " +
                  (dir / "out").string()) == 0);

    auto rows = data_rows(dir / "out" / "predictions.csv");
    REQUIRE(rows.size() == 3);
    std::string expect = fingerprint_hex(config_fingerprint(parse_config_text(kSmallConfig)));
    for (const auto& row : rows) {
        REQUIRE(row.size() == 8);
        CHECK(row[0] == expect);
        CHECK(row[1] == "aoepa");
        CHECK(row[2] == "3");
    }
}

TEST_CASE("channel fixtures round-trip through the csv format") {
    fs::path dir = fresh_dir("chanio");
    fs::path cfg = dir / "base.cfg";
    write_file(cfg, kSmallConfig);

    CHECK(run_cli("channel --config " + cfg.string() + " --channels 2 --out " +
                  (dir / "out").string()) == 0);

    SimConfig parsed = parse_config_text(kSmallConfig);
    for (int m = 0; m < 2; ++m) {
        char name[32];
        std::snprintf(name, sizeof(name), "channel_%03d.csv", m);
        std::uint64_t fp = 0;
        DiscreteChannel got = read_channel_csv((dir / "out" / name).string(), &fp);
        CHECK(fp == config_fingerprint(parsed));

        DiscreteChannel want = sweep_channel(parsed, m);
        REQUIRE(got.n_r == want.n_r);
        REQUIRE(got.n_t == want.n_t);
        REQUIRE(got.l_taps == want.l_taps);
        for (size_t pair = 0; pair < want.h.size(); ++pair)
            for (int t = 0; t < want.l_taps; ++t) CHECK(got.h[pair][t] == want.h[pair][t]);
    }
}
