#include "blindchan/ofdm.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

namespace blindchan {

void OfdmConfig::validate() const {
    if (subcarriers <= 0 || cp_len <= 0) {
        throw DomainError("OfdmConfig: subcarriers and cp_len must be positive");
    }
    if (subcarriers % cp_len != 0) {
        throw DomainError("OfdmConfig: subcarriers (" + std::to_string(subcarriers) +
                          ") must be a multiple of cp_len (" + std::to_string(cp_len) + ")");
    }
    if (max_delay < 0 || max_delay >= cp_len) {
        throw DomainError("OfdmConfig: need 0 <= max_delay < cp_len");
    }
    if (pilot_symbols < 0 || observed_symbols < 0) {
        throw DomainError("OfdmConfig: symbol counts must be non-negative");
    }
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

CVector qpsk_modulate(std::span<const std::uint8_t> bits) {
    if (bits.size() % 2 != 0) {
        throw DimensionError("qpsk_modulate: odd bit count " + std::to_string(bits.size()));
    }
    CVector out(static_cast<Eigen::Index>(bits.size() / 2));
    for (Eigen::Index k = 0; k < out.size(); ++k) {
        const auto b0 = bits[2 * k];
        const auto b1 = bits[2 * k + 1];
        const double im = b0 ? -kInvSqrt2 : kInvSqrt2;
        const double re = b1 ? -kInvSqrt2 : kInvSqrt2;
        out[k] = {re, im};
    }
    return out;
}

BitStream qpsk_demodulate(const CVector& symbols) {
    BitStream bits(static_cast<std::size_t>(2 * symbols.size()));
    for (Eigen::Index k = 0; k < symbols.size(); ++k) {
        bits[2 * k] = symbols[k].imag() < 0.0 ? 1 : 0;
        bits[2 * k + 1] = symbols[k].real() < 0.0 ? 1 : 0;
    }
    return bits;
}

CVector dft_unitary(const CVector& x) {
    Eigen::FFT<double> fft;
    CVector out;
    fft.fwd(out, x);
    return out / std::sqrt(static_cast<double>(x.size()));
}

CVector idft_unitary(const CVector& X) {
    Eigen::FFT<double> fft;
    CVector out;
    fft.inv(out, X);  // scaled by 1/N
    return out * std::sqrt(static_cast<double>(X.size()));
}

CVector frequency_response(const CVector& taps, int subcarriers) {
    if (taps.size() > subcarriers) {
        throw DimensionError("frequency_response: more taps than subcarriers");
    }
    CVector padded = CVector::Zero(subcarriers);
    padded.head(taps.size()) = taps;
    Eigen::FFT<double> fft;
    CVector out;
    fft.fwd(out, padded);
    return out;
}

CVector ofdm_modulate(const CVector& freq, const OfdmConfig& cfg) {
    require_size(freq.size(), cfg.subcarriers, "ofdm_modulate");
    const CVector body = idft_unitary(freq);
    CVector out(cfg.symbol_len());
    out.head(cfg.cp_len) = body.tail(cfg.cp_len);
    out.tail(cfg.subcarriers) = body;
    return out;
}

CVector ofdm_demodulate(const CVector& time, const OfdmConfig& cfg) {
    require_size(time.size(), cfg.symbol_len(), "ofdm_demodulate");
    return dft_unitary(time.tail(cfg.subcarriers));
}

ZfResult zf_equalize(const CVector& obs, const CVector& chan_freq) {
    require_size(chan_freq.size(), obs.size(), "zf_equalize");
    ZfResult res{CVector(obs.size()), 0};
    for (Eigen::Index m = 0; m < obs.size(); ++m) {
        cplx gain = chan_freq[m];
        if (std::abs(gain) < kZfFloor) {
            const double phase = gain == cplx{} ? 0.0 : std::arg(gain);
            gain = std::polar(kZfFloor, phase);
            ++res.floored_bins;
        }
        res.symbols[m] = obs[m] / gain;
    }
    return res;
}

}  // namespace blindchan
