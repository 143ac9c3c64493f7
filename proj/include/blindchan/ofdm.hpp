#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "blindchan/common.hpp"

namespace blindchan {

/// Dimensional parameters of the CP-OFDM link.
///
/// `symbol_len()` is always `subcarriers + cp_len`; the received block is cut
/// into `symbol_len() / cp_len` segments of `cp_len` samples, so the
/// subcarrier count must be a multiple of the prefix length.
struct OfdmConfig {
    int subcarriers = 32;       // M
    int cp_len = 8;             // G
    int max_delay = 4;          // L, channel has L+1 taps
    int pilot_symbols = 64;
    int observed_symbols = 64;

    int symbol_len() const { return subcarriers + cp_len; }
    int pair_len() const { return 2 * subcarriers + cp_len; }
    int taps() const { return max_delay + 1; }

    /// Throws DomainError when M % G != 0 or the ordering L < G < P fails.
    void validate() const;
};

using BitStream = std::vector<std::uint8_t>;

/// Gray-mapped QPSK, unit energy: 00 -> (+1+j), 01 -> (-1+j), 11 -> (-1-j),
/// 10 -> (+1-j), all scaled by 1/sqrt(2). The first bit of a pair selects the
/// sign of the imaginary part, the second the sign of the real part.
CVector qpsk_modulate(std::span<const std::uint8_t> bits);

/// Hard minimum-distance decisions. A sample exactly on a decision boundary
/// (zero real or imaginary part) resolves to the bit value 0 for that axis,
/// i.e. toward the pattern with the smaller integer value.
BitStream qpsk_demodulate(const CVector& symbols);

/// Unitary M-point DFT pair (1/sqrt(M) in both directions).
CVector dft_unitary(const CVector& x);
CVector idft_unitary(const CVector& X);

/// Unnormalized M-point frequency response H[m] = sum_l h_l e^{-j 2 pi m l / M}.
/// With the unitary transform pair this is exactly the per-subcarrier gain
/// seen after CP removal.
CVector frequency_response(const CVector& taps, int subcarriers);

/// IDFT of the subcarrier block followed by a cyclic prefix of the last G
/// samples. Output has length P = M + G.
CVector ofdm_modulate(const CVector& freq, const OfdmConfig& cfg);

/// Drops the prefix and applies the forward unitary DFT.
CVector ofdm_demodulate(const CVector& time, const OfdmConfig& cfg);

struct ZfResult {
    CVector symbols;
    int floored_bins = 0;
};

inline constexpr double kZfFloor = 1e-12;

/// Per-subcarrier division obs[m] / chan[m]. Bins whose gain magnitude falls
/// below kZfFloor are divided by the floor (keeping the phase) and counted.
ZfResult zf_equalize(const CVector& obs, const CVector& chan_freq);

}  // namespace blindchan
