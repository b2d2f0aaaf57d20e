#include "qbeam/eigenbeam.hpp"

#include <Eigen/SVD>

#include "qbeam/linkmodel.hpp"

namespace qbeam {

FreqChannel assemble_freq_channel(const DiscreteChannel& channel, int n_subcarriers) {
    FreqChannel fc;
    fc.n_r = channel.n_r;
    fc.n_t = channel.n_t;
    fc.n_subcarriers = n_subcarriers;
    fc.h.assign(n_subcarriers, ComplexMat::Zero(channel.n_r, channel.n_t));
    for (int j = 0; j < channel.n_r; ++j) {
        for (int i = 0; i < channel.n_t; ++i) {
            ComplexVec resp = circulant_freq_response(channel.pair(j, i), n_subcarriers);
            for (int sc = 0; sc < n_subcarriers; ++sc) fc.h[sc](j, i) = resp[sc];
        }
    }
    return fc;
}

EigenModes eigen_decompose(const FreqChannel& fc, double tol) {
    EigenModes modes;
    modes.n_subcarriers = fc.n_subcarriers;
    modes.u.resize(fc.n_subcarriers);
    modes.v.resize(fc.n_subcarriers);
    modes.gains.resize(fc.n_subcarriers);

    for (int sc = 0; sc < fc.n_subcarriers; ++sc) {
        Eigen::JacobiSVD<ComplexMat> svd(fc.h[sc], Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RealVec& sv = svd.singularValues();
        double cutoff = sv.size() > 0 ? tol * sv[0] : 0.0;
        int rank = 0;
        while (rank < sv.size() && sv[rank] > cutoff && sv[rank] > 0.0) ++rank;

        modes.u[sc] = svd.matrixU().leftCols(rank);
        modes.v[sc] = svd.matrixV().leftCols(rank);
        modes.gains[sc] = sv.head(rank);
        for (int s = 0; s < rank; ++s) modes.flat.push_back({sc, s, sv[s]});
    }
    return modes;
}

BeamformerPair build_beamformers(const EigenModes& modes, const RealVec& p) {
    if (p.size() != modes.mode_count())
        throw std::invalid_argument("build_beamformers: power vector length != mode count");
    for (Eigen::Index k = 0; k < p.size(); ++k)
        if (p[k] < 0.0) throw std::invalid_argument("build_beamformers: negative power");

    BeamformerPair pair;
    pair.n_subcarriers = modes.n_subcarriers;
    pair.tx.resize(modes.n_subcarriers);
    pair.rx.resize(modes.n_subcarriers);

    Eigen::Index cursor = 0;
    for (int sc = 0; sc < modes.n_subcarriers; ++sc) {
        Eigen::Index rank = modes.gains[sc].size();
        ComplexMat b = modes.v[sc];
        for (Eigen::Index s = 0; s < rank; ++s) b.col(s) *= std::sqrt(p[cursor + s]);
        pair.tx[sc] = std::move(b);
        pair.rx[sc] = modes.u[sc];
        cursor += rank;
    }
    return pair;
}

ComplexVec combine_received(const BeamformerPair& pair, const ComplexVec& v) {
    Eigen::Index n_modes = 0;
    for (const ComplexMat& rx : pair.rx) n_modes += rx.cols();

    ComplexVec out(n_modes);
    Eigen::Index cursor = 0;
    Eigen::Index v_cursor = 0;
    for (const ComplexMat& rx : pair.rx) {
        Eigen::Index n_r = rx.rows();
        Eigen::Index rank = rx.cols();
        out.segment(cursor, rank) = rx.adjoint() * v.segment(v_cursor, n_r);
        cursor += rank;
        v_cursor += n_r;
    }
    return out;
}

}  // namespace qbeam
