#pragma once

#include <vector>

#include "qbeam/core.hpp"
#include "qbeam/svchannel.hpp"

namespace qbeam {

struct FreqChannel {
    int n_r = 0;
    int n_t = 0;
    int n_subcarriers = 0;
    std::vector<ComplexMat> h;  // one n_r x n_t matrix per subcarrier
};

FreqChannel assemble_freq_channel(const DiscreteChannel& channel, int n_subcarriers);

struct ModeRef {
    int subcarrier = 0;
    int stream = 0;
    double gain = 0.0;  // singular value
};

struct EigenModes {
    std::vector<ComplexMat> u;          // per subcarrier, n_r x rank
    std::vector<ComplexMat> v;          // per subcarrier, n_t x rank
    std::vector<RealVec> gains;         // per subcarrier, descending
    std::vector<ModeRef> flat;          // subcarrier-major, stream-minor
    int n_subcarriers = 0;

    int mode_count() const { return static_cast<int>(flat.size()); }
    RealVec flat_gains() const {
        RealVec g(flat.size());
        for (size_t k = 0; k < flat.size(); ++k) g[static_cast<Eigen::Index>(k)] = flat[k].gain;
        return g;
    }
};

// Per-subcarrier SVD; singular values below tol * (subcarrier max) are
// dropped so degenerate modes never see power.
EigenModes eigen_decompose(const FreqChannel& fc, double tol = 1e-12);

struct BeamformerPair {
    std::vector<ComplexMat> tx;  // per subcarrier, n_t x rank: V * diag(sqrt(P))
    std::vector<ComplexMat> rx;  // per subcarrier, n_r x rank: U
    int n_subcarriers = 0;

    double total_tx_power() const {
        double s = 0.0;
        for (const ComplexMat& b : tx) s += b.squaredNorm();
        return s;
    }
};

BeamformerPair build_beamformers(const EigenModes& modes, const RealVec& p);

// x_hat = Rx^dagger v per subcarrier, flattened in mode order.
ComplexVec combine_received(const BeamformerPair& pair, const ComplexVec& v);

}  // namespace qbeam
