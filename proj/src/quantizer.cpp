#include "qbeam/quantizer.hpp"

namespace qbeam {

double quantize(double x, int bits) {
    double s = (x < 0.0) ? -1.0 : 1.0;
    double ax = std::fabs(x);
    if (ax >= 1.0) return s * (1.0 - std::ldexp(1.0, -bits));
    double cell = std::floor(std::ldexp(ax, bits - 1));
    return s * (std::ldexp(cell, 1 - bits) + std::ldexp(1.0, -bits));
}

double agc_gain(double expected_rx_power, int n_subcarriers, int n_r, double alpha) {
    if (!(expected_rx_power > 0.0))
        throw std::invalid_argument("agc_gain: expected_rx_power must be positive");
    return std::sqrt(static_cast<double>(n_subcarriers) * n_r * alpha / expected_rx_power);
}

double pqn_c(int bits, double alpha, PqnForm form) {
    if (bits == 0) return 0.0;
    double step_sq = std::ldexp(1.0, -2 * bits);
    switch (form) {
        case PqnForm::nominal: return step_sq / (6.0 * alpha);
        case PqnForm::exact: return step_sq * (2.0 / 3.0) / alpha;
    }
    return 0.0;
}

double pqn_xi_q2(double c, const RealVec& p, const RealVec& gains) {
    if (p.size() == 0) return 0.0;
    double acc = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) acc += p[k] * gains[k] * gains[k];
    return c * acc / static_cast<double>(p.size());
}

PqnParams pqn_params(int bits, double alpha, const RealVec& p, const RealVec& gains) {
    PqnParams out;
    if (bits == 0) return out;
    out.c = pqn_c(bits, alpha, PqnForm::nominal);
    out.xi_q2 = pqn_xi_q2(out.c, p, gains);
    return out;
}

}  // namespace qbeam
