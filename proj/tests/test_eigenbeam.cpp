#include <cmath>

#include "doctest.h"
#include "qbeam/core.hpp"
#include "qbeam/eigenbeam.hpp"
#include "qbeam/linkmodel.hpp"
#include "qbeam/poweralloc.hpp"
#include "qbeam/svchannel.hpp"

using namespace qbeam;

namespace {

DiscreteChannel random_channel(int n_r, int n_t, int l_taps, std::uint64_t seed) {
    Rng rng(seed);
    DiscreteChannel ch;
    ch.n_r = n_r;
    ch.n_t = n_t;
    ch.l_taps = l_taps;
    ch.h.assign(static_cast<size_t>(n_r) * n_t, ComplexVec::Zero(l_taps));
    for (auto& h : ch.h)
        for (int t = 0; t < l_taps; ++t) h[t] = rng.cgauss() / std::sqrt(2.0 * l_taps);
    return ch;
}

DiscreteChannel identity_channel(int n) {
    DiscreteChannel ch;
    ch.n_r = ch.n_t = n;
    ch.l_taps = 1;
    ch.h.assign(static_cast<size_t>(n) * n, ComplexVec::Zero(1));
    for (int i = 0; i < n; ++i) ch.h[i * n + i][0] = 1.0;
    return ch;
}

}  // namespace

TEST_CASE("assembled frequency channel matches per-pair responses") {
    const int n = 8;
    DiscreteChannel ch = random_channel(2, 2, 3, 71);
    FreqChannel fc = assemble_freq_channel(ch, n);
    REQUIRE(fc.n_subcarriers == n);
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            ComplexVec resp = circulant_freq_response(ch.pair(j, i), n);
            for (int sc = 0; sc < n; ++sc) CHECK(std::abs(fc.h[sc](j, i) - resp[sc]) < 1e-12);
        }
    }

    DiscreteChannel id = identity_channel(2);
    FreqChannel fci = assemble_freq_channel(id, 4);
    for (int sc = 0; sc < 4; ++sc)
        CHECK((fci.h[sc] - ComplexMat::Identity(2, 2)).norm() < 1e-14);

    DiscreteChannel siso = random_channel(1, 1, 4, 72);
    FreqChannel fcs = assemble_freq_channel(siso, n);
    ComplexVec resp = circulant_freq_response(siso.pair(0, 0), n);
    for (int sc = 0; sc < n; ++sc) CHECK(std::abs(fcs.h[sc](0, 0) - resp[sc]) < 1e-14);
}

TEST_CASE("identity channel decomposes into unit modes") {
    EigenModes modes = eigen_decompose(assemble_freq_channel(identity_channel(2), 4));
    CHECK(modes.mode_count() == 8);
    for (const ModeRef& m : modes.flat) CHECK(m.gain == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero subcarriers contribute no modes") {
    FreqChannel fc;
    fc.n_r = fc.n_t = 2;
    fc.n_subcarriers = 3;
    fc.h.assign(3, ComplexMat::Identity(2, 2));
    fc.h[1].setZero();
    EigenModes modes = eigen_decompose(fc);
    CHECK(modes.mode_count() == 4);
    for (const ModeRef& m : modes.flat) CHECK(m.subcarrier != 1);
}

TEST_CASE("singular values match the closed-form gram eigenvalues") {
    Rng rng(73);
    for (int rep = 0; rep < 20; ++rep) {
        ComplexMat h(2, 2);
        for (int i = 0; i < 4; ++i) h(i / 2, i % 2) = rng.cgauss();

        FreqChannel fc;
        fc.n_r = fc.n_t = 2;
        fc.n_subcarriers = 1;
        fc.h = {h};
        EigenModes modes = eigen_decompose(fc);
        REQUIRE(modes.mode_count() == 2);

        // eigenvalues of the 2x2 Gram matrix from trace and determinant
        ComplexMat g = h.adjoint() * h;
        double tr = g.trace().real();
        double det = (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)).real();
        double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
        double hi = std::sqrt((tr + disc) / 2.0);
        double lo = std::sqrt(std::max(0.0, (tr - disc) / 2.0));
        CHECK(modes.gains[0][0] == doctest::Approx(hi).epsilon(1e-9));
        CHECK(modes.gains[0][1] == doctest::Approx(lo).epsilon(1e-9));
    }
}

TEST_CASE("factors are unitary and reconstruct the channel") {
    DiscreteChannel ch = random_channel(2, 2, 4, 74);
    FreqChannel fc = assemble_freq_channel(ch, 8);
    EigenModes modes = eigen_decompose(fc);
    for (int sc = 0; sc < 8; ++sc) {
        const ComplexMat& u = modes.u[sc];
        const ComplexMat& v = modes.v[sc];
        CHECK((u.adjoint() * u - ComplexMat::Identity(u.cols(), u.cols())).norm() < 1e-10);
        CHECK((v.adjoint() * v - ComplexMat::Identity(v.cols(), v.cols())).norm() < 1e-10);
        ComplexMat recon = u * modes.gains[sc].asDiagonal() * v.adjoint();
        CHECK((recon - fc.h[sc]).norm() < 1e-9);

        for (int s = 1; s < modes.gains[sc].size(); ++s)
            CHECK(modes.gains[sc][s] <= modes.gains[sc][s - 1] + 1e-15);
    }

    // flat index is subcarrier-major, stream-minor
    int cursor = 0;
    for (int sc = 0; sc < 8; ++sc) {
        for (int s = 0; s < modes.gains[sc].size(); ++s) {
            CHECK(modes.flat[cursor].subcarrier == sc);
            CHECK(modes.flat[cursor].stream == s);
            CHECK(modes.flat[cursor].gain == modes.gains[sc][s]);
            ++cursor;
        }
    }
    CHECK(cursor == modes.mode_count());
}

TEST_CASE("beamformers diagonalize the channel with the allocated amplitudes") {
    DiscreteChannel ch = random_channel(2, 2, 3, 75);
    FreqChannel fc = assemble_freq_channel(ch, 4);
    EigenModes modes = eigen_decompose(fc);
    int n_modes = modes.mode_count();

    Rng rng(76);
    RealVec p(n_modes);
    double budget = 4.0 * 2;
    double raw = 0.0;
    for (int k = 0; k < n_modes; ++k) {
        p[k] = 0.2 + rng.uniform();
        raw += p[k];
    }
    p *= budget / raw;

    BeamformerPair beams = build_beamformers(modes, p);
    CHECK(beams.total_tx_power() == doctest::Approx(budget).epsilon(1e-12));

    int cursor = 0;
    for (int sc = 0; sc < 4; ++sc) {
        ComplexMat comp = beams.rx[sc].adjoint() * fc.h[sc] * beams.tx[sc];
        int rank = static_cast<int>(comp.cols());
        for (int r = 0; r < rank; ++r) {
            for (int col = 0; col < rank; ++col) {
                if (r == col)
                    CHECK(std::abs(comp(r, col) -
                                   cplx(std::sqrt(p[cursor + r]) * modes.gains[sc][r], 0.0)) <
                          1e-10);
                else
                    CHECK(std::abs(comp(r, col)) < 1e-10);
            }
        }
        cursor += rank;
    }
}

TEST_CASE("combined receive noise stays white across modes") {
    const int n = 2;
    const double xi2 = 0.2;
    DiscreteChannel ch = random_channel(2, 2, 2, 77);
    EigenModes modes = eigen_decompose(assemble_freq_channel(ch, n));
    int n_modes = modes.mode_count();
    BeamformerPair beams = build_beamformers(modes, RealVec::Ones(n_modes));

    ComplexVec x = ComplexVec::Zero(n_modes);
    const int draws = 100000;
    ComplexMat cov = ComplexMat::Zero(n_modes, n_modes);
    for (int d = 0; d < draws; ++d) {
        ComplexVec v = simulate_waveform_link(ch, beams, x, xi2, nullptr,
                                              derive_stream_seed(900, d));
        ComplexVec z = combine_received(beams, v);
        cov += z * z.adjoint();
    }
    cov /= draws;
    for (int r = 0; r < n_modes; ++r) {
        for (int col = 0; col < n_modes; ++col) {
            if (r == col)
                CHECK(cov(r, col).real() == doctest::Approx(xi2).epsilon(0.05));
            else
                CHECK(std::abs(cov(r, col)) < 0.05 * xi2);
        }
    }
}

TEST_CASE("diagonal construction beats random unitary mixings in mse") {
    Rng rng(78);
    DiscreteChannel ch = random_channel(2, 2, 2, 79);
    FreqChannel fc = assemble_freq_channel(ch, 2);
    EigenModes modes = eigen_decompose(fc);
    int n_modes = modes.mode_count();
    REQUIRE(n_modes == 4);

    RealVec gains = modes.flat_gains();
    RealVec amps = mmse_pa(gains, static_cast<double>(n_modes));
    RealVec lambda(n_modes);
    for (int k = 0; k < n_modes; ++k) lambda[k] = amps[k] * gains[k];

    ComplexMat lam = ComplexMat::Zero(n_modes, n_modes);
    for (int k = 0; k < n_modes; ++k) lam(k, k) = lambda[k];
    double base = (lam - ComplexMat::Identity(n_modes, n_modes)).squaredNorm();

    for (int rep = 0; rep < 10; ++rep) {
        ComplexMat z(n_modes, n_modes);
        for (int r = 0; r < n_modes; ++r)
            for (int c = 0; c < n_modes; ++c) z(r, c) = rng.cgauss();
        Eigen::HouseholderQR<ComplexMat> qr(z);
        ComplexMat q = qr.householderQ();
        double mixed = (lam * q - ComplexMat::Identity(n_modes, n_modes)).squaredNorm();
        CHECK(base <= mixed + 1e-12);
    }
}
