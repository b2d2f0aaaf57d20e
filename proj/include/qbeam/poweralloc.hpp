#pragma once

#include "qbeam/core.hpp"
#include "qbeam/quantizer.hpp"

namespace qbeam {

// Principal branch on z >= 0; |w*e^w - z| <= 1e-12 * max(1, z).
double lambert_w0(double z);

struct AllocResult {
    RealVec p;
    bool converged = true;
    int iterations = 0;
};

RealVec eepa(int mode_count, double budget);

// Amplitudes minimizing sum((amp_l * gain_l - 1)^2) s.t. sum(amp^2) <= budget.
// Returns 1/gain when that fits the budget, else the water-level solution
// with sum(amp^2) = budget to 1e-10.
RealVec mmse_pa(const RealVec& gains, double budget);

// Closed-form allocation: weight_k = W(g_M * gain_k^4 / xi2^2) / gain_k^2,
// scaled so the powers sum to budget.
RealVec aoepa(const RealVec& gains, double xi2, int qam_order, double budget);

struct OepaOptions {
    PqnForm pqn = PqnForm::exact;
    OepaForm form = OepaForm::kkt;
    // fixed_point only: use the uncorrected xi^2 + xi_q^2 denominators inside
    // the coupling term a instead of (c+1) xi^2 + xi_q^2.
    bool plain_noise_in_a = false;
};

// Minimizes the average-Q BER surrogate over the budget simplex.
AllocResult oepa(const RealVec& gains, double xi2, int qam_order, int bits, double alpha,
                 double budget, const OepaOptions& opts = {});

}  // namespace qbeam
