#include "blindchan/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace blindchan {

namespace {

// Column of H(h) carrying absolute sample u of the two-symbol sequence
// (u in [0, 2P)); prefix samples alias onto the tail of their own body.
Eigen::Index info_column(Eigen::Index u, const OfdmConfig& cfg) {
    const Eigen::Index P = cfg.symbol_len();
    const Eigen::Index M = cfg.subcarriers;
    const Eigen::Index G = cfg.cp_len;
    const Eigen::Index block = u / P;
    const Eigen::Index idx = u % P;
    const Eigen::Index body = idx < G ? idx + M - G : idx - G;
    return block * M + body;
}

// Absolute sample index of stacked row i: the pair starts at sample G of the
// first symbol.
Eigen::Index row_time(Eigen::Index i, const OfdmConfig& cfg) { return cfg.cp_len + i; }

}  // namespace

CVector stack_blocks(const CVector& prev, const CVector& cur, const OfdmConfig& cfg) {
    require_size(prev.size(), cfg.symbol_len(), "stack_blocks prev");
    require_size(cur.size(), cfg.symbol_len(), "stack_blocks cur");
    CVector out(cfg.pair_len());
    out.head(cfg.subcarriers) = prev.tail(cfg.subcarriers);
    out.tail(cfg.symbol_len()) = cur;
    return out;
}

CMatrix build_channel_matrix(const CVector& h, const OfdmConfig& cfg) {
    if (h.size() > cfg.cp_len) {
        throw DimensionError("build_channel_matrix: tap vector longer than prefix");
    }
    const Eigen::Index rows = cfg.pair_len();
    CMatrix H = CMatrix::Zero(rows, 2 * cfg.subcarriers);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Eigen::Index t = row_time(i, cfg);
        for (Eigen::Index l = 0; l < h.size(); ++l) {
            H(i, info_column(t - l, cfg)) += h[l];
        }
    }
    return H;
}

CMatrix analytic_autocorr(const CVector& h, double noise_var, const OfdmConfig& cfg) {
    const CMatrix H = build_channel_matrix(h, cfg);
    CMatrix R = H * H.adjoint();
    R.diagonal().array() += noise_var;
    return R;
}

AutocorrState autocorr_init_from_nearby(const ChannelEstimate& nearby, double noise_var,
                                        const OfdmConfig& cfg, double ff) {
    if (noise_var < 0.0) throw DomainError("autocorr_init_from_nearby: negative noise variance");
    return AutocorrState{analytic_autocorr(nearby.taps.taps, noise_var, cfg), ff, 0, 1.0};
}

AutocorrState autocorr_init_isotropic(double scale, const OfdmConfig& cfg, double ff) {
    const Eigen::Index n = cfg.pair_len();
    return AutocorrState{scale * CMatrix::Identity(n, n), ff, 0, 1.0};
}

AutocorrState autocorr_init_zero(const OfdmConfig& cfg, double ff) {
    const Eigen::Index n = cfg.pair_len();
    return AutocorrState{CMatrix::Zero(n, n), ff, 0, 0.0};
}

void autocorr_update(AutocorrState& state, const CVector& pair) {
    require_size(pair.size(), state.matrix.rows(), "autocorr_update");
    if (!(state.ff >= 0.0 && state.ff <= 1.0)) {
        throw DomainError("autocorr_update: forgetting factor must lie in [0, 1]");
    }
    if (state.ff < 1.0) {
        state.matrix *= state.ff;
        state.matrix.noalias() += (1.0 - state.ff) * (pair * pair.adjoint());
        const CMatrix sym = 0.5 * (state.matrix + state.matrix.adjoint());
        state.matrix = sym;
    }
    state.init_weight *= state.ff;
    ++state.update_count;
}

SubspaceDecomposition noise_subspace(const CMatrix& matrix, const OfdmConfig& cfg) {
    require_size(matrix.rows(), cfg.pair_len(), "noise_subspace");
    require_size(matrix.cols(), cfg.pair_len(), "noise_subspace");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix);
    if (es.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "noise_subspace: eigensolver failed (max |entry| " << matrix.cwiseAbs().maxCoeff()
            << ", hermitian defect " << (matrix - matrix.adjoint()).cwiseAbs().maxCoeff()
            << ", trace " << matrix.trace().real() << ")";
        throw NumericError(msg.str());
    }
    SubspaceDecomposition dec;
    dec.eigvals = es.eigenvalues().reverse();
    dec.noise_vecs = es.eigenvectors().leftCols(cfg.cp_len);
    dec.signal_dim = 2 * cfg.subcarriers;
    return dec;
}

CMatrix noise_vector_image(const CVector& v, const OfdmConfig& cfg) {
    require_size(v.size(), cfg.pair_len(), "noise_vector_image");
    CMatrix img = CMatrix::Zero(cfg.cp_len, 2 * cfg.subcarriers);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const cplx w = std::conj(v[i]);
        const Eigen::Index t = row_time(i, cfg);
        for (Eigen::Index l = 0; l < cfg.cp_len; ++l) img(l, info_column(t - l, cfg)) += w;
    }
    return img;
}

CMatrix orthogonality_form(const CMatrix& noise_vecs, const OfdmConfig& cfg) {
    CMatrix Q = CMatrix::Zero(cfg.cp_len, cfg.cp_len);
    for (Eigen::Index j = 0; j < noise_vecs.cols(); ++j) {
        const CMatrix img = noise_vector_image(noise_vecs.col(j), cfg);
        // h^T img img^H conj(h) = h^H conj(img) img^T h
        Q.noalias() += img.conjugate() * img.transpose();
    }
    return 0.5 * (Q + Q.adjoint());
}

ChannelEstimate estimate_from_form(const CMatrix& Q) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(Q);
    if (es.info() != Eigen::Success) throw NumericError("estimate_channel: form eigensolver failed");
    const auto& ev = es.eigenvalues();
    ChannelEstimate est;
    est.taps.taps = es.eigenvectors().col(0);
    est.taps.active_len = static_cast<int>(Q.rows());
    est.residual = ev[0];
    if (ev.size() < 2) {
        est.cond_gap = std::numeric_limits<double>::infinity();
    } else {
        const double lo = std::max(ev[0], 0.0);
        est.cond_gap = lo > 0.0 ? ev[1] / lo : std::numeric_limits<double>::infinity();
        if (ev[1] <= 0.0) est.cond_gap = 1.0;
    }
    est.ill_conditioned = est.cond_gap < kMinCondGap;
    return est;
}

ChannelEstimate estimate_channel(const SubspaceDecomposition& dec, const OfdmConfig& cfg) {
    require_size(dec.noise_vecs.cols(), cfg.cp_len, "estimate_channel noise vectors");
    return estimate_from_form(orthogonality_form(dec.noise_vecs, cfg));
}

ChannelEstimate resolve_ambiguity(const ChannelEstimate& est, const PilotFrame& pilots,
                                  const OfdmConfig& cfg) {
    if (pilots.tx_freq.empty()) throw DimensionError("resolve_ambiguity: no pilot blocks");
    if (pilots.tx_freq.size() != pilots.rx_freq.size()) {
        throw DimensionError("resolve_ambiguity: pilot tx/rx block counts differ");
    }
    const CVector resp = frequency_response(est.taps.taps, cfg.subcarriers);
    const double energy = resp.squaredNorm();
    if (energy == 0.0) throw DomainError("resolve_ambiguity: zero-energy channel estimate");

    cplx num{};
    for (std::size_t b = 0; b < pilots.tx_freq.size(); ++b) {
        require_size(pilots.rx_freq[b].size(), cfg.subcarriers, "resolve_ambiguity rx block");
        const CVector observed = pilots.rx_freq[b].cwiseQuotient(pilots.tx_freq[b]);
        num += resp.dot(observed);
    }
    const cplx alpha = num / (energy * static_cast<double>(pilots.tx_freq.size()));

    ChannelEstimate out = est;
    out.alpha = alpha;
    out.taps.taps = alpha * est.taps.taps;
    out.freq_response = alpha * resp;
    return out;
}

double default_rank_floor(const OfdmConfig& cfg) {
    return cfg.pair_len() * std::numeric_limits<double>::epsilon();
}

RankDiagnostic rank_from_eigvals(const RVector& ev, const OfdmConfig& cfg,
                                 std::optional<double> floor) {
    RankDiagnostic diag;
    diag.floor = floor.value_or(default_rank_floor(cfg));
    diag.required_rank = 2 * cfg.subcarriers;
    diag.lambda_max = ev.size() > 0 ? ev.maxCoeff() : 0.0;
    if (diag.lambda_max > 0.0) {
        const double cut = diag.floor * diag.lambda_max;
        diag.numerical_rank = static_cast<int>((ev.array() > cut).count());
    }
    diag.valid = diag.numerical_rank >= diag.required_rank + 1;
    return diag;
}

RankDiagnostic rank_check(const CMatrix& matrix, const OfdmConfig& cfg,
                          std::optional<double> floor) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        RankDiagnostic diag;
        diag.required_rank = 2 * cfg.subcarriers;
        return diag;
    }
    return rank_from_eigvals(es.eigenvalues(), cfg, floor);
}

SubspaceEstimator::SubspaceEstimator(OfdmConfig cfg, AutocorrState initial,
                                     std::optional<double> rank_floor)
    : cfg_(cfg), state_(std::move(initial)), rank_floor_(rank_floor) {
    require_size(state_.matrix.rows(), cfg_.pair_len(), "SubspaceEstimator");
}

void SubspaceEstimator::push_block(const CVector& rx_block) {
    if (prev_) update(stack_blocks(*prev_, rx_block, cfg_));
    prev_ = rx_block;
}

std::optional<ChannelEstimate> SubspaceEstimator::estimate() const {
    const SubspaceDecomposition dec = noise_subspace(state_, cfg_);
    if (!rank_from_eigvals(dec.eigvals, cfg_, rank_floor_).valid) return std::nullopt;
    return estimate_channel(dec, cfg_);
}

}  // namespace blindchan
