#include "blindchan/pilot.hpp"

#include <cmath>

namespace blindchan {

std::vector<CVector> make_pilot_blocks(int count, const OfdmConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::vector<CVector> blocks;
    blocks.reserve(static_cast<std::size_t>(count));
    BitStream bits(static_cast<std::size_t>(2 * cfg.subcarriers));
    for (int b = 0; b < count; ++b) {
        for (auto& bit : bits) bit = coin(rng) ? 1 : 0;
        blocks.push_back(qpsk_modulate(bits));
    }
    return blocks;
}

ChannelEstimate ls_estimate(const PilotFrame& frame, const OfdmConfig& cfg) {
    if (frame.tx_freq.empty()) throw DimensionError("ls_estimate: empty pilot frame");
    if (frame.tx_freq.size() != frame.rx_freq.size()) {
        throw DimensionError("ls_estimate: pilot tx/rx block counts differ");
    }
    const int M = cfg.subcarriers;
    const int G = cfg.cp_len;
    const auto nblocks = static_cast<double>(frame.tx_freq.size());

    CVector raw = CVector::Zero(M);
    for (std::size_t b = 0; b < frame.tx_freq.size(); ++b) {
        require_size(frame.tx_freq[b].size(), M, "ls_estimate tx block");
        require_size(frame.rx_freq[b].size(), M, "ls_estimate rx block");
        raw += frame.rx_freq[b].cwiseQuotient(frame.tx_freq[b]);
    }
    raw /= nblocks;

    // Unnormalized response -> taps: h = IDFT_unnormalized(H) / M.
    const CVector time = idft_unitary(raw) / std::sqrt(static_cast<double>(M));
    ChannelEstimate est;
    est.taps = ChannelTaps::from_taps(time.head(G), G);
    est.freq_response = frequency_response(est.taps.taps, M);

    double misfit = 0.0;
    for (std::size_t b = 0; b < frame.tx_freq.size(); ++b) {
        misfit += (frame.rx_freq[b] - est.freq_response.cwiseProduct(frame.tx_freq[b])).squaredNorm();
    }
    const double dof = nblocks * M - G;
    est.residual = dof > 0 ? misfit / dof : 0.0;
    return est;
}

double nmse(const CVector& est, const CVector& truth) {
    require_size(est.size(), truth.size(), "nmse");
    const double ref = truth.squaredNorm();
    if (ref == 0.0) throw DomainError("nmse: zero-norm reference channel");
    return (est - truth).squaredNorm() / ref;
}

double aligned_nmse(const CVector& est, const CVector& truth) {
    require_size(est.size(), truth.size(), "aligned_nmse");
    const double e2 = est.squaredNorm();
    if (e2 == 0.0) return 1.0;
    const cplx a = est.dot(truth) / e2;  // dot conjugates the left operand
    return nmse(CVector(a * est), truth);
}

}  // namespace blindchan
