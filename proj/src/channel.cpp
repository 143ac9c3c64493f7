#include "blindchan/channel.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace blindchan {

ChannelTaps ChannelTaps::from_taps(const CVector& h, int cp_len) {
    if (h.size() > cp_len) {
        throw DimensionError("ChannelTaps: " + std::to_string(h.size()) +
                             " taps exceed prefix length " + std::to_string(cp_len));
    }
    ChannelTaps out{CVector::Zero(cp_len), static_cast<int>(h.size())};
    out.taps.head(h.size()) = h;
    return out;
}

PowerDelayProfile PowerDelayProfile::uniform(int paths) {
    return PowerDelayProfile{std::vector<double>(static_cast<std::size_t>(paths), 1.0 / paths)};
}

PowerDelayProfile PowerDelayProfile::normalized(std::vector<double> powers) {
    double total = 0.0;
    for (double p : powers) {
        if (!(p >= 0.0)) throw DomainError("PowerDelayProfile: negative tap power");
        total += p;
    }
    if (powers.empty() || total <= 0.0) throw DomainError("PowerDelayProfile: zero total power");
    for (double& p : powers) p /= total;
    return PowerDelayProfile{std::move(powers)};
}

cplx complex_gaussian(Rng& rng, double variance) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

ChannelTaps draw_channel(const PowerDelayProfile& pdp, int cp_len, Rng& rng) {
    if (pdp.paths() > cp_len) {
        throw DimensionError("draw_channel: profile longer than prefix");
    }
    ChannelTaps h{CVector::Zero(cp_len), pdp.paths()};
    for (int j = 0; j < pdp.paths(); ++j) {
        h.taps[j] = complex_gaussian(rng, pdp.tap_powers[static_cast<std::size_t>(j)]);
    }
    return h;
}

std::pair<ChannelTaps, ChannelTaps> draw_correlated_pair(const NearbyPairSpec& spec, int cp_len,
                                                         Rng& rng) {
    if (!(spec.rho >= 0.0 && spec.rho <= 1.0)) {
        throw DomainError("draw_correlated_pair: rho must lie in [0, 1]");
    }
    ChannelTaps a = draw_channel(spec.pdp, cp_len, rng);
    const ChannelTaps w = draw_channel(spec.pdp, cp_len, rng);
    ChannelTaps b = a;
    if (spec.rho < 1.0) {
        b.taps = spec.rho * a.taps + std::sqrt(1.0 - spec.rho * spec.rho) * w.taps;
    }
    return {std::move(a), std::move(b)};
}

ChannelLine::ChannelLine(ChannelTaps taps, double noise_var)
    : taps_(std::move(taps)), memory_(CVector::Zero(taps_.taps.size() - 1)), noise_var_(noise_var) {
    if (taps_.taps.size() < 1) throw DimensionError("ChannelLine: empty tap vector");
    if (noise_var < 0.0) throw DomainError("ChannelLine: negative noise variance");
}

CVector ChannelLine::propagate_clean(const CVector& tx) {
    const Eigen::Index ntaps = taps_.taps.size();
    const Eigen::Index mem = ntaps - 1;
    if (tx.size() < mem) {
        throw DimensionError("ChannelLine: block shorter than channel memory");
    }
    // x[-i] = memory[mem - i], i = 1..mem
    auto sample = [&](Eigen::Index n) -> cplx { return n >= 0 ? tx[n] : memory_[mem + n]; };
    CVector out(tx.size());
    for (Eigen::Index n = 0; n < tx.size(); ++n) {
        cplx acc{};
        for (Eigen::Index l = 0; l < taps_.active_len; ++l) acc += taps_.taps[l] * sample(n - l);
        out[n] = acc;
    }
    memory_ = tx.tail(mem);
    return out;
}

CVector ChannelLine::propagate(const CVector& tx, Rng& rng) {
    CVector out = propagate_clean(tx);
    if (noise_var_ > 0.0) {
        for (auto& v : out) v += complex_gaussian(rng, noise_var_);
    }
    return out;
}

double snr_to_noise_var(double snr_db, double signal_power) {
    if (!(signal_power > 0.0)) throw DomainError("snr_to_noise_var: signal power must be positive");
    return signal_power / std::pow(10.0, snr_db / 10.0);
}

}  // namespace blindchan
