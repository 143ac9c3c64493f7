#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "blindchan/common.hpp"
#include "blindchan/ofdm.hpp"

namespace blindchan {

using Rng = std::mt19937_64;

/// Complex impulse response padded to the prefix length G. Taps at index
/// >= active_len are zero.
struct ChannelTaps {
    CVector taps;
    int active_len = 0;

    static ChannelTaps from_taps(const CVector& h, int cp_len);
    double energy() const { return taps.squaredNorm(); }
};

/// Average per-tap power of the multipath channel. Normalized to unit sum.
struct PowerDelayProfile {
    std::vector<double> tap_powers;

    static PowerDelayProfile uniform(int paths);
    /// Throws DomainError on negative or all-zero powers; rescales to unit sum.
    static PowerDelayProfile normalized(std::vector<double> powers);
    int paths() const { return static_cast<int>(tap_powers.size()); }
};

struct NearbyPairSpec {
    double rho = 1.0;
    PowerDelayProfile pdp;
};

/// Circularly symmetric complex Gaussian sample with E|z|^2 = variance.
cplx complex_gaussian(Rng& rng, double variance);

/// Independent Rayleigh taps, tap j with variance pdp[j]. Output padded with
/// zeros to `cp_len` taps.
ChannelTaps draw_channel(const PowerDelayProfile& pdp, int cp_len, Rng& rng);

/// h_B = rho h_A + sqrt(1 - rho^2) w, w an independent draw from the same
/// profile. Both marginals follow `draw_channel`.
std::pair<ChannelTaps, ChannelTaps> draw_correlated_pair(const NearbyPairSpec& spec, int cp_len,
                                                         Rng& rng);

/// Stateful FIR link. `memory` keeps the last G-1 transmitted samples so that
/// consecutive blocks see the previous block's tail (inter-block interference).
class ChannelLine {
public:
    ChannelLine(ChannelTaps taps, double noise_var);

    /// Linear convolution with the taps plus i.i.d. complex noise of variance
    /// noise_var per sample. Output has the same length as `tx`.
    CVector propagate(const CVector& tx, Rng& rng);
    /// Noiseless variant; memory is updated the same way.
    CVector propagate_clean(const CVector& tx);

    const ChannelTaps& taps() const { return taps_; }
    const CVector& memory() const { return memory_; }
    double noise_var() const { return noise_var_; }
    void set_noise_var(double v) { noise_var_ = v; }
    void reset() { memory_.setZero(); }

private:
    ChannelTaps taps_;
    CVector memory_;
    double noise_var_;
};

/// sigma^2 = signal_power / 10^(snr_db/10). The SNR is the per-sample power
/// ratio at the channel output assuming a unit-energy channel.
double snr_to_noise_var(double snr_db, double signal_power = 1.0);

}  // namespace blindchan
