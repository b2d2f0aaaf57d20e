#pragma once

#include "qbeam/core.hpp"

namespace qbeam {

// Uniform mid-point quantizer with range (-1, 1) and b bits per real
// dimension. Inputs with |x| >= 1 clip to the outermost level. There is no
// zero output level; sign(0) is taken as +1.
double quantize(double x, int bits);

inline cplx quantize(cplx x, int bits) {
    return cplx(quantize(x.real(), bits), quantize(x.imag(), bits));
}

// G = sqrt(N * n_R * alpha / E||r||^2): scales the expected received block
// energy down to alpha per complex sample before quantization.
double agc_gain(double expected_rx_power, int n_subcarriers, int n_r, double alpha);

struct PqnParams {
    double c = 0.0;
    double xi_q2 = 0.0;
};

// Dimensionless quantization-noise constant. The nominal form is
// 2^(-2b)/(6 alpha); the exact form is 2^(-2b)*(2/3)/alpha, i.e. the
// step^2/12 error variance the quantizer actually produces.
double pqn_c(int bits, double alpha, PqnForm form);

// Nominal-form constants: c and xi_q^2 = c * mean_k(P_k * gain_k^2).
// bits == 0 means full precision and returns (0, 0).
PqnParams pqn_params(int bits, double alpha, const RealVec& p, const RealVec& gains);

// Same signal-power average with a caller-chosen c.
double pqn_xi_q2(double c, const RealVec& p, const RealVec& gains);

struct AdcModel {
    int bits = 0;
    double alpha = 0.1;
    double gain = 1.0;
};

}  // namespace qbeam
