#pragma once

#include <optional>
#include <string>

#include "blindchan/channel.hpp"
#include "blindchan/common.hpp"
#include "blindchan/ofdm.hpp"
#include "blindchan/pilot.hpp"

namespace blindchan {

// Subspace blind channel estimation for CP-OFDM.
//
// Two consecutive received blocks are stacked into a (2M+G)-vector r = H(h) s + n,
// where s holds the 2M information samples (prefix removed) of the two symbols.
// H(h) has full column rank 2M, so the autocorrelation E[r r^H] has a G-dimensional
// noise subspace orthogonal to range(H(h)). The channel is the (unit-norm) tap
// vector minimising sum_j ||v_j^H H(h)||^2 over the noise eigenvectors v_j, and is
// defined only up to a complex scalar which pilots then fix.

/// Stacked pair: the last M samples of `prev` followed by all P samples of `cur`.
CVector stack_blocks(const CVector& prev, const CVector& cur, const OfdmConfig& cfg);

/// (2M+G) x 2M matrix mapping the information samples of two consecutive
/// symbols to the stacked received pair. Built from the FIR convolution with
/// the cyclic prefix copies, so it is linear in `h` and exact for any tap
/// vector of length <= G.
CMatrix build_channel_matrix(const CVector& h, const OfdmConfig& cfg);
inline CMatrix build_channel_matrix(const ChannelTaps& h, const OfdmConfig& cfg) {
    return build_channel_matrix(h.taps, cfg);
}

/// Running autocorrelation estimate.
struct AutocorrState {
    CMatrix matrix;
    double ff = 1.0;          // forgetting factor; 0 keeps only the newest pair
    int update_count = 0;
    double init_weight = 0.0;  // remaining mass of the injected initial state
};

/// H(h) H(h)^H + noise_var I: the exact statistics of a link with channel h,
/// white unit-power symbols and noise_var white noise.
CMatrix analytic_autocorr(const CVector& h, double noise_var, const OfdmConfig& cfg);

/// Seeds the state with the exact statistics implied by a nearby-channel estimate.
AutocorrState autocorr_init_from_nearby(const ChannelEstimate& nearby, double noise_var,
                                        const OfdmConfig& cfg, double ff);
/// scale * I. Carries no directional information, so it leaves every
/// eigenvector of the data term unchanged while keeping the matrix full rank.
AutocorrState autocorr_init_isotropic(double scale, const OfdmConfig& cfg, double ff);
/// All-zero state (no initial information at all).
AutocorrState autocorr_init_zero(const OfdmConfig& cfg, double ff);

/// matrix <- ff matrix + (1 - ff) pair pair^H, then re-symmetrized.
void autocorr_update(AutocorrState& state, const CVector& pair);

struct SubspaceDecomposition {
    RVector eigvals;    // descending
    CMatrix noise_vecs;  // eigenvectors of the G smallest eigenvalues
    int signal_dim = 0;
};

SubspaceDecomposition noise_subspace(const CMatrix& matrix, const OfdmConfig& cfg);
inline SubspaceDecomposition noise_subspace(const AutocorrState& s, const OfdmConfig& cfg) {
    return noise_subspace(s.matrix, cfg);
}

/// G x 2M matrix with v^H H(h) = h^T result for every h.
CMatrix noise_vector_image(const CVector& v, const OfdmConfig& cfg);

/// G x G Hermitian form with h^H Q h = sum_j ||v_j^H H(h)||^2.
CMatrix orthogonality_form(const CMatrix& noise_vecs, const OfdmConfig& cfg);

inline constexpr double kMinCondGap = 10.0;

/// Smallest-eigenvalue eigenvector of a Hermitian form, with residual and
/// cond_gap = lambda_2 / lambda_1 filled in.
ChannelEstimate estimate_from_form(const CMatrix& Q);

/// Unit-norm minimiser of the orthogonality form. `ill_conditioned` is set when
/// the two smallest form eigenvalues are within kMinCondGap of each other.
ChannelEstimate estimate_channel(const SubspaceDecomposition& dec, const OfdmConfig& cfg);

/// Fits the complex scalar alpha by least squares between the estimate's
/// frequency response and the per-bin pilot observations rx/tx, then scales
/// the taps by it.
ChannelEstimate resolve_ambiguity(const ChannelEstimate& est, const PilotFrame& pilots,
                                  const OfdmConfig& cfg);

/// Relative eigenvalue floor for the numerical rank: (2M+G) * machine epsilon,
/// the usual LAPACK-style tolerance. Exponentially forgotten observations keep
/// eigenvalues far below 1e-9 lambda_max that are still well above round-off.
double default_rank_floor(const OfdmConfig& cfg);

struct RankDiagnostic {
    int numerical_rank = 0;
    int required_rank = 0;  // 2M
    double lambda_max = 0.0;
    double floor = 0.0;
    bool valid = false;     // numerical_rank >= 2M + 1
};

/// Counts eigenvalues above floor * lambda_max (floor defaults to
/// default_rank_floor). Valid when that count reaches 2M + 1.
RankDiagnostic rank_check(const CMatrix& matrix, const OfdmConfig& cfg,
                          std::optional<double> floor = std::nullopt);
RankDiagnostic rank_from_eigvals(const RVector& eigvals, const OfdmConfig& cfg,
                                 std::optional<double> floor = std::nullopt);
inline RankDiagnostic rank_check(const AutocorrState& s, const OfdmConfig& cfg,
                                 std::optional<double> floor = std::nullopt) {
    return rank_check(s.matrix, cfg, floor);
}

/// Autocorrelation tracking plus estimation, refusing to estimate from a
/// rank-deficient state.
class SubspaceEstimator {
public:
    SubspaceEstimator(OfdmConfig cfg, AutocorrState initial,
                      std::optional<double> rank_floor = std::nullopt);

    /// Stacks with the previously pushed block (if any) and updates the state.
    void push_block(const CVector& rx_block);
    void update(const CVector& pair) { autocorr_update(state_, pair); }

    RankDiagnostic rank() const { return rank_check(state_, cfg_, rank_floor_); }
    /// nullopt when rank() is not valid.
    std::optional<ChannelEstimate> estimate() const;

    const AutocorrState& state() const { return state_; }

private:
    OfdmConfig cfg_;
    AutocorrState state_;
    std::optional<double> rank_floor_;
    std::optional<CVector> prev_;
};

}  // namespace blindchan
