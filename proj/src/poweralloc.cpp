#include "qbeam/poweralloc.hpp"

namespace qbeam {

double lambert_w0(double z) {
    if (z < 0.0) throw std::domain_error("lambert_w0: argument must be nonnegative");
    if (z == 0.0) return 0.0;

    double w;
    if (z > 1e100) {
        // Solve w + log(w) = log(z) to avoid overflowing exp(w).
        double lz = std::log(z);
        w = lz - std::log(lz);
        for (int i = 0; i < 50; ++i) {
            double f = w + std::log(w) - lz;
            double step = f / (1.0 + 1.0 / w);
            w -= step;
            if (std::fabs(step) < 1e-15 * w) break;
        }
        return w;
    }

    if (z < 1e-8) {
        w = z * (1.0 - z);
    } else if (z < 3.0) {
        w = z / (1.0 + z);
    } else {
        double l1 = std::log(z);
        double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }

    double tol = 0.5e-13 * std::max(1.0, z);
    for (int i = 0; i < 40; ++i) {
        double e = std::exp(w);
        double f = w * e - z;
        if (std::fabs(f) <= tol) break;
        double denom = e * (w + 1.0) - (w + 2.0) * f / (2.0 * (w + 1.0));
        w -= f / denom;
    }
    return w;
}

RealVec eepa(int mode_count, double budget) {
    if (mode_count < 1) throw std::invalid_argument("eepa: mode_count must be >= 1");
    return RealVec::Constant(mode_count, budget / mode_count);
}

RealVec mmse_pa(const RealVec& gains, double budget) {
    Eigen::Index n = gains.size();
    for (Eigen::Index k = 0; k < n; ++k)
        if (!(gains[k] > 0.0)) throw std::invalid_argument("mmse_pa: gains must be positive");

    double unconstrained = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) unconstrained += 1.0 / (gains[k] * gains[k]);
    if (unconstrained <= budget) {
        RealVec amp(n);
        for (Eigen::Index k = 0; k < n; ++k) amp[k] = 1.0 / gains[k];
        return amp;
    }

    auto amp_sq_sum = [&](double mu) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            double d2 = gains[k] * gains[k];
            double a = gains[k] / (d2 + mu);
            s += a * a;
        }
        return s;
    };

    double lo = 0.0, hi = 1.0;
    while (amp_sq_sum(hi) > budget) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (amp_sq_sum(mid) > budget) lo = mid; else hi = mid;
        if (std::fabs(amp_sq_sum(mid) - budget) < 1e-12 * budget) { lo = hi = mid; break; }
    }
    double mu = 0.5 * (lo + hi);
    RealVec amp(n);
    for (Eigen::Index k = 0; k < n; ++k) amp[k] = gains[k] / (gains[k] * gains[k] + mu);
    return amp;
}

RealVec aoepa(const RealVec& gains, double xi2, int qam_order, double budget) {
    Eigen::Index n = gains.size();
    double g = 3.0 / (qam_order - 1);
    double xi4 = xi2 * xi2;
    RealVec w(n);
    double total = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        double d = gains[k] * gains[k];
        w[k] = lambert_w0(g * d * d / xi4) / d;
        total += w[k];
    }
    return RealVec(budget * w / total);
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

// Surrogate-gradient stationarity: with T the effective per-mode noise power
// and R = sum_j phi(sqrt(u_j)) * sqrt(u_j), each mode's Q-argument solves
// u_k = W(g^2 d_k^2 / (2 pi (2 T mu + c d_k R / n)^2)), and the budget
// multiplier mu is bisected so the powers sum to the budget.
AllocResult oepa_kkt(const RealVec& d, double xi2, double g, double c, double budget) {
    Eigen::Index n = d.size();
    AllocResult res;
    res.p = eepa(static_cast<int>(n), budget);

    double d_min = d.minCoeff();
    double prev_delta = std::numeric_limits<double>::infinity();

    for (int outer = 0; outer < 200; ++outer) {
        res.iterations = outer + 1;
        double mean_pd = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) mean_pd += res.p[k] * d[k];
        mean_pd /= static_cast<double>(n);
        double t = (c + 1.0) * xi2 + c * mean_pd;

        double r = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            double u = g * res.p[k] * d[k] / t;
            r += kInvSqrt2Pi * std::exp(-0.5 * u) * std::sqrt(u);
        }

        auto powers_at = [&](double mu, RealVec& out) {
            double sum = 0.0;
            for (Eigen::Index k = 0; k < n; ++k) {
                double lin = 2.0 * t * mu + c * d[k] * r / static_cast<double>(n);
                double arg = g * g * d[k] * d[k] / (2.0 * M_PI * lin * lin);
                out[k] = t * lambert_w0(arg) / (g * d[k]);
                sum += out[k];
            }
            return sum;
        };

        double pole = (c > 0.0) ? -c * d_min * r / (2.0 * n * t) : 0.0;
        double delta0 = std::max(1e-30, std::fabs(pole) * 1e-12);
        RealVec trial(n);
        double lo = pole + delta0;
        for (int shrink = 0; shrink < 8 && powers_at(lo, trial) <= budget; ++shrink)
            lo = pole + (lo - pole) * 1e-3;
        double hi = std::max(1.0, std::fabs(pole) * 4.0 + 1.0);
        while (powers_at(hi, trial) > budget) hi *= 4.0;

        RealVec pnew(n);
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            double sum = powers_at(mid, pnew);
            if (sum > budget) lo = mid; else hi = mid;
            if (std::fabs(sum - budget) <= 1e-12 * budget) break;
        }
        powers_at(0.5 * (lo + hi), pnew);
        pnew *= budget / pnew.sum();

        double delta = (pnew - res.p).cwiseAbs().maxCoeff();
        double damp = (delta > prev_delta) ? 0.5 : 1.0;
        res.p += damp * (pnew - res.p);
        prev_delta = delta;
        if (delta < 1e-9 * std::max(1.0, budget)) {
            res.converged = true;
            return res;
        }
    }
    res.converged = false;
    return res;
}

AllocResult oepa_fixed_point(const RealVec& d, double xi2, double g, double c, double budget,
                             bool plain_noise_in_a) {
    Eigen::Index n = d.size();
    AllocResult res;
    res.p = eepa(static_cast<int>(n), budget);
    double prev_delta = std::numeric_limits<double>::infinity();

    for (int outer = 0; outer < 200; ++outer) {
        res.iterations = outer + 1;
        double mean_pd = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) mean_pd += res.p[k] * d[k];
        mean_pd /= static_cast<double>(n);
        double xi_q2 = c * mean_pd;
        double t = (c + 1.0) * xi2 + xi_q2;
        double t_lead = xi2 + xi_q2;
        double t_a = plain_noise_in_a ? t_lead : t;

        double a = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            double pd = res.p[k] * d[k];
            a += std::sqrt(pd) * std::exp(-g * pd / t_a);
        }
        a *= c / std::pow(t_a, 1.5);

        auto powers_at = [&](double omega, RealVec& out) {
            double sum = 0.0;
            for (Eigen::Index k = 0; k < n; ++k) {
                double arg = g * d[k] * d[k] / (t * t * (omega * omega + d[k] * a * a));
                out[k] = t_lead * lambert_w0(arg) / (g * d[k]);
                sum += out[k];
            }
            return sum;
        };

        RealVec pnew(n);
        double lo = 0.0;
        if (powers_at(lo, pnew) < budget) {
            // No omega >= 0 can reach the budget; rescale and keep iterating.
            res.converged = false;
            pnew *= budget / pnew.sum();
        } else {
            double hi = 1.0;
            while (powers_at(hi, pnew) > budget) hi *= 4.0;
            for (int i = 0; i < 200; ++i) {
                double mid = 0.5 * (lo + hi);
                double sum = powers_at(mid, pnew);
                if (sum > budget) lo = mid; else hi = mid;
                if (std::fabs(sum - budget) <= 1e-12 * budget) break;
            }
            powers_at(0.5 * (lo + hi), pnew);
            pnew *= budget / pnew.sum();
        }

        double delta = (pnew - res.p).cwiseAbs().maxCoeff();
        double damp = (delta > prev_delta) ? 0.5 : 1.0;
        res.p += damp * (pnew - res.p);
        prev_delta = delta;
        if (delta < 1e-8) {
            res.converged = true;
            return res;
        }
    }
    res.converged = false;
    return res;
}

}  // namespace

AllocResult oepa(const RealVec& gains, double xi2, int qam_order, int bits, double alpha,
                 double budget, const OepaOptions& opts) {
    Eigen::Index n = gains.size();
    RealVec d(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!(gains[k] > 0.0)) throw std::invalid_argument("oepa: gains must be positive");
        d[k] = gains[k] * gains[k];
    }
    double g = 3.0 / (qam_order - 1);
    double c = pqn_c(bits, alpha, opts.pqn);
    if (opts.form == OepaForm::kkt) return oepa_kkt(d, xi2, g, c, budget);
    return oepa_fixed_point(d, xi2, g, c, budget, opts.plain_noise_in_a);
}

}  // namespace qbeam
