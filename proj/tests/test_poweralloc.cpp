#include <cmath>

#include "doctest.h"
#include "qbeam/analysis.hpp"
#include "qbeam/core.hpp"
#include "qbeam/poweralloc.hpp"
#include "qbeam/quantizer.hpp"

using namespace qbeam;

namespace {

double surrogate_s(const RealVec& p, const RealVec& gains, double xi2, int qam_order, int bits,
                   double alpha) {
    double c = pqn_c(bits, alpha, PqnForm::exact);
    double xi_q2 = pqn_xi_q2(c, p, gains);
    return ber_surrogate(sinr_per_mode(p, gains, xi2, c, xi_q2), qam_order);
}

}  // namespace

TEST_CASE("lambert w0 reference values") {
    CHECK(lambert_w0(0.0) == 0.0);
    CHECK(std::abs(lambert_w0(std::exp(1.0)) - 1.0) <= 1e-14);
    CHECK(lambert_w0(1.0) == doctest::Approx(0.56714329040978384).epsilon(1e-14));
    CHECK(lambert_w0(4.0) == doctest::Approx(1.2021678731970429).epsilon(1e-14));
    CHECK(lambert_w0(2.5) == doctest::Approx(0.95858635672870296).epsilon(1e-14));
}

TEST_CASE("lambert w0 inverts w*exp(w) across twenty decades") {
    for (int i = 0; i <= 1000; ++i) {
        double z = std::pow(10.0, -12.0 + 20.0 * i / 1000.0);
        double w = lambert_w0(z);
        CHECK(std::abs(w * std::exp(w) - z) <= 1e-12 * std::max(1.0, z));
    }
}

TEST_CASE("equal allocation splits the budget evenly") {
    RealVec p = eepa(4, 4.0);
    REQUIRE(p.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(p[k] == 1.0);
    RealVec q = eepa(2, 4.0);
    CHECK(q[0] == 2.0);
    CHECK(q[1] == 2.0);
}

TEST_CASE("mmse amplitudes invert the gains when the budget allows") {
    RealVec gains(2);
    gains << 1.0, 1.0;
    RealVec a = mmse_pa(gains, 2.0);
    CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(1.0).epsilon(1e-12));

    gains << 2.0, 1.0;
    a = mmse_pa(gains, 2.0);
    CHECK(a[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mmse saturated case matches the water-level solution") {
    RealVec gains(2);
    gains << 1.0, 0.1;
    RealVec a = mmse_pa(gains, 2.0);
    CHECK(a[0] == doctest::Approx(0.9230759401974451).epsilon(1e-10));
    CHECK(a[1] == doctest::Approx(1.0714153296591395).epsilon(1e-10));
    CHECK(a.squaredNorm() == doctest::Approx(2.0).epsilon(1e-9));

    // the same point from the stationary family amp = g / (g^2 + mu)
    double mu = 0.083334486852837952;
    for (int k = 0; k < 2; ++k)
        CHECK(a[k] == doctest::Approx(gains[k] / (gains[k] * gains[k] + mu)).epsilon(1e-9));

    // dense sweep of the power sphere: no feasible point does better
    double j_best = 1e300;
    const int steps = 200000;
    for (int i = 1; i < steps; ++i) {
        double theta = 0.5 * M_PI * i / steps;
        double a0 = std::sqrt(2.0) * std::cos(theta);
        double a1 = std::sqrt(2.0) * std::sin(theta);
        double j = (a0 * gains[0] - 1.0) * (a0 * gains[0] - 1.0) +
                   (a1 * gains[1] - 1.0) * (a1 * gains[1] - 1.0);
        j_best = std::min(j_best, j);
    }
    double j_mmse = (a[0] * gains[0] - 1.0) * (a[0] * gains[0] - 1.0) +
                    (a[1] * gains[1] - 1.0) * (a[1] * gains[1] - 1.0);
    CHECK(j_mmse <= j_best + 1e-4);
}

TEST_CASE("closed-form allocation reference point") {
    RealVec gains(2);
    gains << std::sqrt(2.0), 1.0;
    RealVec p = aoepa(gains, 1.0, 4, 2.0);
    CHECK(p[0] == doctest::Approx(1.0290531203211686).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.9709468796788312).epsilon(1e-12));
    CHECK(p.sum() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("closed-form allocation is equal for equal gains and exhausts the budget") {
    RealVec gains = RealVec::Ones(4);
    RealVec p = aoepa(gains, 0.1, 16, 4.0);
    for (int k = 0; k < 4; ++k) CHECK(p[k] == doctest::Approx(1.0).epsilon(1e-12));

    RealVec g2(5);
    g2 << 0.3, 0.8, 1.0, 2.0, 0.05;
    RealVec p2 = aoepa(g2, 0.25, 16, 10.0);
    CHECK(p2.sum() == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(p2.minCoeff() > 0.0);
}

TEST_CASE("closed-form allocation weight rises then falls in the mode strength") {
    // w(d) = W(d^2)/d for xi2 = 1, g_M = 1 peaks at d = sqrt(e), so the raw
    // weight is not monotone in the singular value even though the received
    // power w*d is
    const double d_peak = std::sqrt(std::exp(1.0));
    int best = -1;
    double w_best = -1.0;
    const int n = 2000;
    RealVec d(n), w(n);
    for (int i = 0; i < n; ++i) {
        d[i] = std::pow(10.0, -2.0 + 4.0 * i / (n - 1.0));
        w[i] = lambert_w0(d[i] * d[i]) / d[i];
        if (w[i] > w_best) {
            w_best = w[i];
            best = i;
        }
    }
    CHECK(std::abs(d[best] - d_peak) / d_peak < 0.01);
    for (int i = 0; i + 1 < n; ++i) {
        if (d[i + 1] <= d_peak * 0.999) CHECK(w[i + 1] > w[i]);
        if (d[i] >= d_peak * 1.001) CHECK(w[i + 1] < w[i]);
    }
}

TEST_CASE("closed-form allocation sends more received power to stronger modes") {
    RealVec gains(4);
    gains << 0.3, 0.8, 1.0, 2.0;
    RealVec p = aoepa(gains, 0.25, 16, 4.0);
    for (int k = 1; k < 4; ++k) {
        double prev = p[k - 1] * gains[k - 1] * gains[k - 1];
        double cur = p[k] * gains[k] * gains[k];
        CHECK(cur >= prev - 1e-12);
    }
}

TEST_CASE("optimizer gives equal powers for equal gains") {
    RealVec gains = RealVec::Ones(4);
    for (OepaForm form : {OepaForm::kkt, OepaForm::fixed_point}) {
        OepaOptions opts;
        opts.form = form;
        AllocResult res = oepa(gains, 0.1, 16, 3, 0.1, 4.0, opts);
        CHECK(res.converged);
        for (int k = 0; k < 4; ++k) CHECK(res.p[k] == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("optimizer at full precision matches the closed-form stationary family") {
    // with no quantization term the stationary condition solves in closed
    // form as P_k = xi2 W(g_M d_k^2 / xi2^2) / (g_M d_k) with d = gain^2;
    // picking the budget as that family's sum pins the optimum to it exactly
    RealVec gains(4);
    gains << 1.3, 0.9, 0.6, 1.1;
    const double xi2 = 0.5;
    const int qam_order = 16;
    const double g_m = 3.0 / (qam_order - 1);

    RealVec closed(4);
    double budget = 0.0;
    for (int k = 0; k < 4; ++k) {
        double d = gains[k] * gains[k];
        closed[k] = xi2 * lambert_w0(g_m * d * d / (xi2 * xi2)) / (g_m * d);
        budget += closed[k];
    }

    OepaOptions kkt;
    AllocResult res = oepa(gains, xi2, qam_order, 0, 0.1, budget, kkt);
    CHECK(res.converged);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(res.p[k] - closed[k]) < 1e-6);

    OepaOptions fp;
    fp.form = OepaForm::fixed_point;
    AllocResult res_fp = oepa(gains, xi2, qam_order, 0, 0.1, budget, fp);
    CHECK(res_fp.converged);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(res_fp.p[k] - closed[k]) < 1e-3);

    RealVec p_a = aoepa(gains, xi2, qam_order, budget);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(p_a[k] - closed[k]) < 1e-9);
}

TEST_CASE("optimizer beats every point of a dense budget-simplex grid") {
    RealVec gains(4);
    gains << 2.0, std::sqrt(2.0), 1.0, std::sqrt(0.5);
    const double xi2 = 0.1;
    const int qam_order = 16;
    const int bits = 3;
    const double alpha = 0.1;
    const double budget = 4.0;

    AllocResult res = oepa(gains, xi2, qam_order, bits, alpha, budget);
    CHECK(res.converged);
    CHECK(res.p.sum() == doctest::Approx(budget).epsilon(1e-9));
    double s_opt = surrogate_s(res.p, gains, xi2, qam_order, bits, alpha);

    double s_grid = 1e300;
    int points = 0;
    RealVec p(4);
    for (int k1 = 0; k1 <= 20; ++k1) {
        for (int k2 = 0; k2 + k1 <= 20; ++k2) {
            for (int k3 = 0; k3 + k2 + k1 <= 20; ++k3) {
                int k4 = 20 - k1 - k2 - k3;
                p << 0.2 * k1, 0.2 * k2, 0.2 * k3, 0.2 * k4;
                s_grid = std::min(s_grid, surrogate_s(p, gains, xi2, qam_order, bits, alpha));
                ++points;
            }
        }
    }
    CHECK(points == 1771);
    CHECK(s_opt <= s_grid + 1e-12);
}

// The optimizer never loses to either closed form.  The closed form usually
// beats equal split but not always: when most modes sit far below threshold
// the W(x)/d weight still funds them while the flat split happens to feed the
// one viable mode better.  On this stream that inversion hits 5 of 200
// instances, so the ordering is pinned as a majority, not a universal.
TEST_CASE("surrogate ordering: optimizer dominates, closed form usually beats equal split") {
    Rng rng(0xC4C4);
    const int qam_order = 16;
    const int bits = 3;
    const double alpha = 0.1;
    const double budget = 4.0;
    int inversions = 0;
    for (int inst = 0; inst < 200; ++inst) {
        RealVec gains(4);
        for (int k = 0; k < 4; ++k)
            gains[k] = std::exp(std::log(0.05) +
                                (std::log(4.0) - std::log(0.05)) * rng.uniform());
        double xi2 = std::pow(10.0, -3.0 + 2.5 * rng.uniform());

        AllocResult res = oepa(gains, xi2, qam_order, bits, alpha, budget);
        CHECK(res.converged);
        double s_opt = surrogate_s(res.p, gains, xi2, qam_order, bits, alpha);
        double s_a = surrogate_s(aoepa(gains, xi2, qam_order, budget), gains, xi2, qam_order,
                                 bits, alpha);
        double s_e = surrogate_s(eepa(4, budget), gains, xi2, qam_order, bits, alpha);
        CHECK(s_opt <= s_a + 1e-12);
        CHECK(s_opt <= s_e + 1e-12);
        if (s_a > s_e + 1e-12) ++inversions;
    }
    CHECK(inversions >= 1);
    CHECK(inversions <= 15);
}

TEST_CASE("fixed-point form also respects the budget and stays nonnegative") {
    RealVec gains(4);
    gains << 2.0, std::sqrt(2.0), 1.0, std::sqrt(0.5);
    OepaOptions opts;
    opts.form = OepaForm::fixed_point;
    AllocResult res = oepa(gains, 0.1, 16, 3, 0.1, 4.0, opts);
    CHECK(res.p.sum() == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(res.p.minCoeff() >= 0.0);
}
