#include "doctest.h"

#include "blindchan/pilot.hpp"
#include "test_util.hpp"

using namespace blindchan;

namespace {

PilotFrame send(ChannelLine& line, int blocks, const OfdmConfig& cfg, Rng& rng) {
    PilotFrame f;
    for (const auto& p : make_pilot_blocks(blocks, cfg)) {
        f.tx_freq.push_back(p);
        f.rx_freq.push_back(ofdm_demodulate(line.propagate(ofdm_modulate(p, cfg), rng), cfg));
    }
    return f;
}

}  // namespace

TEST_CASE("pilot blocks are deterministic unit-modulus QPSK") {
    OfdmConfig cfg;
    const auto a = make_pilot_blocks(3, cfg);
    const auto b = make_pilot_blocks(3, cfg);
    REQUIRE(a.size() == 3);
    CHECK(a[2] == b[2]);
    CHECK((a[0].cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-15);
    CHECK(a[0] != a[1]);
}

TEST_CASE("noiseless LS recovers the taps") {
    OfdmConfig cfg;
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto h = draw_channel(PowerDelayProfile::uniform(5), cfg.cp_len, rng);
        ChannelLine line(h, 0.0);
        const auto est = ls_estimate(send(line, 1, cfg, rng), cfg);
        CHECK((est.taps.taps - h.taps).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(est.residual < 1e-20);
    }
}

TEST_CASE("flat channel response") {
    OfdmConfig cfg;
    Rng rng(1);
    ChannelLine line(ChannelTaps::from_taps(CVector::Ones(1), cfg.cp_len), 0.0);
    const auto est = ls_estimate(send(line, 2, cfg, rng), cfg);
    CHECK((est.freq_response.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("pilot averaging gain") {
    // Oracle: each kept tap carries noise of variance sigma^2 / (N M), so the
    // expected tap error energy is G sigma^2 / (N M).
    OfdmConfig cfg;
    const double sigma2 = 0.1;
    const int trials = 200;
    double prev_nmse = 1e9;
    for (const int blocks : {1, 8, 64}) {
        Rng rng(100 + blocks);
        double err = 0.0, nm = 0.0, resid = 0.0;
        for (int t = 0; t < trials; ++t) {
            const auto h = draw_channel(PowerDelayProfile::uniform(5), cfg.cp_len, rng);
            ChannelLine line(h, sigma2);
            const auto est = ls_estimate(send(line, blocks, cfg, rng), cfg);
            err += (est.taps.taps - h.taps).squaredNorm();
            nm += nmse(est.taps, h);
            resid += est.residual;
        }
        const double expected = cfg.cp_len * sigma2 / (blocks * cfg.subcarriers);
        CHECK(err / trials == doctest::Approx(expected).epsilon(0.15));
        CHECK(resid / trials == doctest::Approx(sigma2).epsilon(0.1));
        CHECK(nm / trials < prev_nmse);
        prev_nmse = nm / trials;
    }
}

TEST_CASE("ls error paths") {
    OfdmConfig cfg;
    CHECK_THROWS_AS(ls_estimate(PilotFrame{}, cfg), DimensionError);
    PilotFrame bad;
    bad.tx_freq.push_back(CVector::Ones(32));
    CHECK_THROWS_AS(ls_estimate(bad, cfg), DimensionError);
}

TEST_CASE("nmse") {
    Rng rng(2);
    const CVector h = testutil::random_cvec(8, rng);
    CHECK(nmse(h, h) == 0.0);
    CHECK(nmse(CVector::Zero(8), h) == doctest::Approx(1.0));
    CHECK(nmse(CVector(2.0 * h), h) == doctest::Approx(1.0));
    CHECK_THROWS_AS(nmse(h, CVector::Zero(8)), DomainError);
    CHECK_THROWS_AS(nmse(h, CVector::Zero(7)), DimensionError);
    CHECK(aligned_nmse(CVector(cplx(0.3, -2.0) * h), h) < 1e-28);
}
