#pragma once

#include <cstdint>
#include <vector>

#include "blindchan/channel.hpp"
#include "blindchan/common.hpp"
#include "blindchan/ofdm.hpp"

namespace blindchan {

/// Output of any channel estimator.
///
/// For the subspace estimator `taps` is unit-norm until the scalar ambiguity
/// has been resolved, after which it carries `alpha`. `residual` is the
/// estimator's own misfit: the smallest quadratic-form eigenvalue for the
/// subspace method, the per-sample noise power for pilot LS.
struct ChannelEstimate {
    ChannelTaps taps;
    cplx alpha{1.0, 0.0};
    double residual = 0.0;
    double cond_gap = 0.0;
    bool ill_conditioned = false;
    CVector freq_response;  // M-point response of `taps` (filled by pilot LS)
};

/// Known pilot blocks and what came out of the demodulator for them.
struct PilotFrame {
    std::vector<CVector> tx_freq;
    std::vector<CVector> rx_freq;
};

inline constexpr std::uint64_t kPilotSeed = 0x50494c4f54534551ULL;

/// Deterministic QPSK pilot blocks: bits drawn from mt19937_64(seed), mapped
/// with qpsk_modulate, M symbols per block.
std::vector<CVector> make_pilot_blocks(int count, const OfdmConfig& cfg,
                                       std::uint64_t seed = kPilotSeed);

/// Per-bin LS averaged over pilot blocks, then truncated to G time taps.
/// `residual` is the noise power estimated from the fit misfit with
/// N*M - G degrees of freedom.
ChannelEstimate ls_estimate(const PilotFrame& frame, const OfdmConfig& cfg);

/// ||est - truth||^2 / ||truth||^2.
double nmse(const CVector& est, const CVector& truth);
inline double nmse(const ChannelTaps& est, const ChannelTaps& truth) {
    return nmse(est.taps, truth.taps);
}

/// NMSE after the best complex scalar alignment, min_a ||a est - truth||^2 / ||truth||^2.
double aligned_nmse(const CVector& est, const CVector& truth);

}  // namespace blindchan
