#include "qbeam/linkmodel.hpp"

#include "qbeam/eigenbeam.hpp"

namespace qbeam {

namespace {

int gray_decode(int g) {
    int v = 0;
    for (; g; g >>= 1) v ^= g;
    return v;
}

void check_order(int qam_order) {
    if (qam_order != 4 && qam_order != 16 && qam_order != 64)
        throw std::invalid_argument("qam_order must be 4, 16 or 64");
}

}  // namespace

ComplexVec qam_modulate(const std::vector<std::uint8_t>& bits, int qam_order) {
    check_order(qam_order);
    int m_bits = bits_per_symbol(qam_order);
    if (bits.size() % m_bits != 0)
        throw std::invalid_argument("bit count not divisible by bits per symbol");
    int half = m_bits / 2;
    int levels = 1 << half;
    double d = std::sqrt(3.0 / (2.0 * (qam_order - 1)));

    ComplexVec out(bits.size() / m_bits);
    for (Eigen::Index s = 0; s < out.size(); ++s) {
        const std::uint8_t* p = bits.data() + s * m_bits;
        int gi = 0, gq = 0;
        for (int b = 0; b < half; ++b) {
            gi = (gi << 1) | p[b];
            gq = (gq << 1) | p[half + b];
        }
        double re = (levels - 1 - 2 * gray_decode(gi)) * d;
        double im = (levels - 1 - 2 * gray_decode(gq)) * d;
        out[s] = cplx(re, im);
    }
    return out;
}

std::vector<std::uint8_t> qam_demodulate(const ComplexVec& symbols, int qam_order) {
    check_order(qam_order);
    int m_bits = bits_per_symbol(qam_order);
    int half = m_bits / 2;
    int levels = 1 << half;
    double d = std::sqrt(3.0 / (2.0 * (qam_order - 1)));

    auto decide = [&](double x) {
        long v = std::lround((levels - 1 - x / d) / 2.0);
        int vi = static_cast<int>(std::clamp(v, 0L, static_cast<long>(levels - 1)));
        return vi ^ (vi >> 1);  // reflected-Gray encode
    };

    std::vector<std::uint8_t> bits(static_cast<size_t>(symbols.size()) * m_bits);
    for (Eigen::Index s = 0; s < symbols.size(); ++s) {
        int gi = decide(symbols[s].real());
        int gq = decide(symbols[s].imag());
        std::uint8_t* p = bits.data() + s * m_bits;
        for (int b = 0; b < half; ++b) {
            p[b] = (gi >> (half - 1 - b)) & 1;
            p[half + b] = (gq >> (half - 1 - b)) & 1;
        }
    }
    return bits;
}

void fft_unitary(ComplexVec& x, bool inverse) {
    const Eigen::Index n = x.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_unitary: length must be a power of two");

    for (Eigen::Index i = 1, j = 0; i < n; ++i) {
        Eigen::Index bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    double sign = inverse ? 1.0 : -1.0;
    for (Eigen::Index len = 2; len <= n; len <<= 1) {
        double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        cplx wl(std::cos(ang), std::sin(ang));
        for (Eigen::Index i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (Eigen::Index k = 0; k < len / 2; ++k) {
                cplx a = x[i + k];
                cplx b = x[i + k + len / 2] * w;
                x[i + k] = a + b;
                x[i + k + len / 2] = a - b;
                w *= wl;
            }
        }
    }
    x /= std::sqrt(static_cast<double>(n));
}

ComplexVec circulant_freq_response(const ComplexVec& h, int n) {
    if (h.size() > n) throw std::invalid_argument("circulant_freq_response: more taps than bins");
    ComplexVec padded = ComplexVec::Zero(n);
    padded.head(h.size()) = h;
    fft_unitary(padded, false);
    padded *= std::sqrt(static_cast<double>(n));  // unnormalized DFT
    return padded;
}

ComplexVec simulate_waveform_link(const DiscreteChannel& channel, const BeamformerPair& tx,
                                  const ComplexVec& x, double xi2, const AdcModel* adc,
                                  std::uint64_t seed) {
    const int n_t = channel.n_t;
    const int n_r = channel.n_r;
    const int n = tx.n_subcarriers;
    const int l_cp = channel.l_taps > 1 ? channel.l_taps - 1 : 0;

    double power = tx.total_tx_power();
    double budget = static_cast<double>(n) * std::min(n_t, n_r);
    if (power > budget + 1e-9)
        throw std::invalid_argument("simulate_waveform_link: transmit power exceeds budget");

    // Per-subcarrier beamforming, then one unitary IDFT per transmit antenna.
    std::vector<ComplexVec> time_tx(n_t, ComplexVec::Zero(n));
    Eigen::Index mode_cursor = 0;
    for (int sc = 0; sc < n; ++sc) {
        const ComplexMat& b = tx.tx[sc];
        Eigen::Index rank = b.cols();
        Eigen::VectorXcd u = b * x.segment(mode_cursor, rank);
        mode_cursor += rank;
        for (int a = 0; a < n_t; ++a) time_tx[a][sc] = u[a];
    }
    for (int a = 0; a < n_t; ++a) fft_unitary(time_tx[a], true);

    Rng rng(seed);
    const int total = l_cp + n;
    std::vector<ComplexVec> rx(n_r, ComplexVec::Zero(n));
    double noise_scale = std::sqrt(xi2);

    for (int j = 0; j < n_r; ++j) {
        ComplexVec acc = ComplexVec::Zero(n);
        for (int i = 0; i < n_t; ++i) {
            const ComplexVec& h = channel.pair(j, i);
            const ComplexVec& s = time_tx[i];
            int n_taps = static_cast<int>(h.size());
            for (int t = l_cp; t < total; ++t) {
                // Convolve [CP | block] with the taps; the prefix wraps the
                // tail of the block around, so only kept samples are formed.
                cplx v(0.0, 0.0);
                for (int l = 0; l < n_taps; ++l) {
                    int src = t - l - l_cp;
                    if (src < 0) src += n;
                    v += h[l] * s[src];
                }
                acc[t - l_cp] += v;
            }
        }
        for (int t = 0; t < n; ++t) rx[j][t] = acc[t] + noise_scale * rng.cgauss();
    }

    if (adc && adc->bits > 0) {
        double g = adc->gain;
        for (int j = 0; j < n_r; ++j)
            for (int t = 0; t < n; ++t) rx[j][t] = quantize(g * rx[j][t], adc->bits) / g;
    }

    for (int j = 0; j < n_r; ++j) fft_unitary(rx[j], false);

    ComplexVec v(static_cast<Eigen::Index>(n) * n_r);
    for (int sc = 0; sc < n; ++sc)
        for (int j = 0; j < n_r; ++j) v[static_cast<Eigen::Index>(sc) * n_r + j] = rx[j][sc];
    return v;
}

}  // namespace qbeam
