#include "qbeam/analysis.hpp"

namespace qbeam {

double q_function(double x) {
    return 0.5 * std::erfc(x * M_SQRT1_2);
}

RealVec sinr_per_mode(const RealVec& p, const RealVec& gains, double xi2, double c,
                      double xi_q2) {
    double denom = (c + 1.0) * xi2 + xi_q2;
    RealVec out(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k)
        out[k] = p[k] * gains[k] * gains[k] / denom;
    return out;
}

double ber_surrogate(const RealVec& sinr, int qam_order) {
    if (sinr.size() == 0) return 0.0;
    double g = 3.0 / (qam_order - 1);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < sinr.size(); ++k) acc += q_function(std::sqrt(g * sinr[k]));
    return (1.0 - 1.0 / std::sqrt(static_cast<double>(qam_order))) * acc /
           static_cast<double>(sinr.size());
}

double qam_ber_exact(double sinr, int qam_order) {
    int levels = qam_order == 4 ? 2 : qam_order == 16 ? 4 : 8;
    int bits_per_axis = qam_order == 4 ? 1 : qam_order == 16 ? 2 : 3;
    double a = std::sqrt(3.0 * std::max(sinr, 0.0) / (qam_order - 1));

    double total = 0.0;
    for (int k = 1; k <= bits_per_axis; ++k) {
        int scale = 1 << (k - 1);
        int upper = levels - levels / (1 << k) - 1;
        double pk = 0.0;
        for (int i = 0; i <= upper; ++i) {
            int f = i * scale / levels;
            double sign = (f % 2 == 0) ? 1.0 : -1.0;
            double coef = scale - std::floor(static_cast<double>(i) * scale / levels + 0.5);
            pk += sign * coef * 2.0 * q_function((2 * i + 1) * a);
        }
        total += pk / levels;
    }
    return std::clamp(total / bits_per_axis, 0.0, 0.5);
}

BerPrediction analytic_uncoded_ber(const RealVec& p, const RealVec& gains, double xi2,
                                   int qam_order, int bits, double alpha, PqnForm pqn,
                                   BerForm form) {
    BerPrediction out;
    if (p.size() == 0) return out;
    double c = pqn_c(bits, alpha, pqn);
    double xi_q2 = pqn_xi_q2(c, p, gains);
    RealVec sinr = sinr_per_mode(p, gains, xi2, c, xi_q2);
    out.s = ber_surrogate(sinr, qam_order);
    if (form == BerForm::first_order) {
        double m_bits = std::log2(static_cast<double>(qam_order));
        out.ber = std::clamp(4.0 * out.s / m_bits, 0.0, 0.5);
    } else {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < sinr.size(); ++k) acc += qam_ber_exact(sinr[k], qam_order);
        out.ber = std::clamp(acc / static_cast<double>(sinr.size()), 0.0, 0.5);
    }
    return out;
}

double mse_diag(const RealVec& effective_diag, double xi2, double xi_q2, int mode_count) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < effective_diag.size(); ++k) {
        double e = effective_diag[k] - 1.0;
        acc += e * e;
    }
    return acc + (xi2 + xi_q2) * mode_count;
}

}  // namespace qbeam
