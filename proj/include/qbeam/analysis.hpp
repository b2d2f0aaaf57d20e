#pragma once

#include "qbeam/core.hpp"
#include "qbeam/quantizer.hpp"

namespace qbeam {

// Standard normal tail probability via erfc.
double q_function(double x);

// SINR_k = P_k gain_k^2 / ((c + 1) xi2 + xi_q2).
RealVec sinr_per_mode(const RealVec& p, const RealVec& gains, double xi2, double c,
                      double xi_q2);

// S = (1 - 1/sqrt(M)) * mean_k Q(sqrt(g_M * sinr_k)).
double ber_surrogate(const RealVec& sinr, int qam_order);

// Exact Gray-coded square-QAM bit error rate at the given per-symbol SINR.
// For M = 4 this is exactly Q(sqrt(sinr)).
double qam_ber_exact(double sinr, int qam_order);

struct BerPrediction {
    double s = 0.0;
    double ber = 0.0;
};

// Uncoded-BER prediction from the diagonal model. BerForm::first_order
// returns 4S/log2(M) clamped to [0, 0.5]; BerForm::exact averages the
// closed-form Gray-QAM expression over modes.
BerPrediction analytic_uncoded_ber(const RealVec& p, const RealVec& gains, double xi2,
                                   int qam_order, int bits, double alpha,
                                   PqnForm pqn = PqnForm::exact,
                                   BerForm form = BerForm::exact);

// Frobenius MSE of the diagonalized system:
// sum_k (sqrt(P_k) gain_k - 1)^2 + (xi2 + xi_q2) * mode_count.
double mse_diag(const RealVec& effective_diag, double xi2, double xi_q2, int mode_count);

}  // namespace qbeam
