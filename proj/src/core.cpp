#include "qbeam/core.hpp"

namespace qbeam {

static bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate(const SimConfig& cfg) {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument(field + ": " + why);
    };
    if (cfg.n_t < 1) fail("n_T", "must be >= 1");
    if (cfg.n_r < 1) fail("n_R", "must be >= 1");
    if (!power_of_two(cfg.n_subcarriers)) fail("N", "must be a power of two");
    if (cfg.l_cp < 0 || cfg.l_cp >= cfg.n_subcarriers) fail("L_cp", "must satisfy 0 <= L_cp < N");
    if (cfg.qam_order != 4 && cfg.qam_order != 16 && cfg.qam_order != 64)
        fail("M", "must be one of 4, 16, 64");
    if (!(cfg.noise_variance > 0.0)) fail("noise_variance", "must be positive");
    if (cfg.adc_bits != 0 && (cfg.adc_bits < 1 || cfg.adc_bits > 16))
        fail("adc_bits", "must be 1..16 or full");
    if (!(cfg.agc_alpha > 0.0)) fail("agc_alpha", "must be positive");
    if (cfg.trials < 1) fail("trials", "must be >= 1");
    if (!(cfg.sv.Lambda > 0.0)) fail("Lambda", "must be positive");
    if (!(cfg.sv.lambda > 0.0)) fail("lambda", "must be positive");
    if (!(cfg.sv.Gamma > 0.0)) fail("Gamma", "must be positive");
    if (!(cfg.sv.gamma > 0.0)) fail("gamma", "must be positive");
    if (!(cfg.sv.sigma_c >= 0.0)) fail("sigma_c", "must be nonnegative");
    if (!(cfg.sv.sigma_r >= 0.0)) fail("sigma_r", "must be nonnegative");
    if (!(cfg.sv.mean_clusters > 0.0)) fail("L_c", "must be positive");
    if (!(cfg.sv.mean_rays > 0.0)) fail("L_r", "must be positive");
    if (!(cfg.sv.sample_period > 0.0)) fail("sample_period", "must be positive");
}

Allocator allocator_from_name(const std::string& name) {
    if (name == "eepa") return Allocator::eepa;
    if (name == "aoepa") return Allocator::aoepa;
    if (name == "oepa") return Allocator::oepa;
    if (name == "mmse") return Allocator::mmse;
    throw std::invalid_argument("unknown allocator: " + name);
}

}  // namespace qbeam
