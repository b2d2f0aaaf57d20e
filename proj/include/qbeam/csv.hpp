#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbeam/core.hpp"
#include "qbeam/harness.hpp"
#include "qbeam/svchannel.hpp"

namespace qbeam {

std::string format_double(double v);
std::string fingerprint_hex(std::uint64_t fp);

void write_results_csv(const std::string& path, const ResultTable& table);
void write_plotdata_csv(const std::string& path, const ResultTable& table);

struct AllocationRow {
    int mode_index = 0;
    int subcarrier = 0;
    int stream = 0;
    double singular_value = 0.0;
    double power = 0.0;
};

void write_allocation_csv(const std::string& path, std::uint64_t fingerprint,
                          const std::vector<AllocationRow>& rows);

struct PredictionRow {
    Allocator alloc = Allocator::eepa;
    int adc_bits = 0;
    double snr_db = 0.0;
    double surrogate = 0.0;
    double ber_analytic = 0.0;
    double mse_analytic = 0.0;
    bool converged = true;
};

void write_predictions_csv(const std::string& path, std::uint64_t fingerprint,
                           const std::vector<PredictionRow>& rows);

void write_channel_csv(const std::string& path, std::uint64_t fingerprint,
                       const DiscreteChannel& channel);
DiscreteChannel read_channel_csv(const std::string& path,
                                 std::uint64_t* fingerprint = nullptr);

}  // namespace qbeam
