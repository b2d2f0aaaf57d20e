#pragma once

#include <vector>

#include "qbeam/core.hpp"
#include "qbeam/quantizer.hpp"
#include "qbeam/svchannel.hpp"

namespace qbeam {

struct EigenModes;
struct BeamformerPair;

// Square-QAM with reflected Gray coding per axis. For each symbol the first
// log2(M)/2 bits select the I level (MSB first), the rest the Q level; level
// v maps to amplitude (sqrt(M) - 1 - 2v) * d with d = sqrt(3 / (2(M - 1))),
// giving unit average energy. M = 4 sends bits 00 to (1+j)/sqrt(2).
ComplexVec qam_modulate(const std::vector<std::uint8_t>& bits, int qam_order);

// Minimum-distance hard decision followed by Gray de-mapping.
std::vector<std::uint8_t> qam_demodulate(const ComplexVec& symbols, int qam_order);

inline int bits_per_symbol(int qam_order) {
    return qam_order == 4 ? 2 : qam_order == 16 ? 4 : 6;
}

// In-place unitary radix-2 transform (1/sqrt(N) scaling both directions).
void fft_unitary(ComplexVec& x, bool inverse);

// N-point DFT of the zero-padded taps: the diagonal of F C F^dagger for the
// circulant matrix C built from h.
ComplexVec circulant_freq_response(const ComplexVec& h, int n);

// Full time-domain chain: per-subcarrier transmit beamforming, unitary
// IDFT per antenna, cyclic prefix, per-pair convolution with the channel
// taps, AWGN of variance xi2 per complex sample, optional AGC + per-real-
// dimension quantization (undone by 1/G afterwards), prefix strip, unitary
// DFT. Returns the received frequency-domain vector, subcarrier-major.
// adc == nullptr means full precision.
ComplexVec simulate_waveform_link(const DiscreteChannel& channel, const BeamformerPair& tx,
                                  const ComplexVec& x, double xi2, const AdcModel* adc,
                                  std::uint64_t seed);

}  // namespace qbeam
