#include "doctest.h"

#include <numbers>

#include "blindchan/ofdm.hpp"
#include "test_util.hpp"

using namespace blindchan;
using testutil::random_cvec;

namespace {

BitStream random_bits(std::size_t n, Rng& rng) {
    std::bernoulli_distribution coin(0.5);
    BitStream b(n);
    for (auto& x : b) x = coin(rng) ? 1 : 0;
    return b;
}

}  // namespace

TEST_CASE("qpsk constellation points") {
    const double a = 1.0 / std::numbers::sqrt2;
    const BitStream b00{0, 0}, b01{0, 1}, b11{1, 1}, b10{1, 0};
    CHECK(std::abs(qpsk_modulate(b00)[0] - cplx(a, a)) < 1e-15);
    CHECK(std::abs(qpsk_modulate(b01)[0] - cplx(-a, a)) < 1e-15);
    CHECK(std::abs(qpsk_modulate(b11)[0] - cplx(-a, -a)) < 1e-15);
    CHECK(std::abs(qpsk_modulate(b10)[0] - cplx(a, -a)) < 1e-15);
    for (const auto& b : {b00, b01, b11, b10}) {
        CHECK(std::abs(qpsk_modulate(b)[0]) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(qpsk_demodulate(qpsk_modulate(b)) == b);
    }
}

TEST_CASE("qpsk rejects odd bit counts") {
    const BitStream odd{0, 1, 1};
    CHECK_THROWS_AS(qpsk_modulate(odd), DimensionError);
}

TEST_CASE("qpsk hard decisions") {
    CVector y(3);
    y << cplx(0.9, 0.8), cplx(-0.1, -0.2), cplx(0.0, 0.0);
    const BitStream bits = qpsk_demodulate(y);
    CHECK(bits == BitStream{0, 0, 1, 1, 0, 0});  // boundary sample resolves to 00
}

TEST_CASE("qpsk round trip on random bits") {
    Rng rng(11);
    const BitStream bits = random_bits(10000, rng);
    const CVector sym = qpsk_modulate(bits);
    CHECK(sym.size() == 5000);
    CHECK(qpsk_demodulate(sym) == bits);
}

TEST_CASE("ofdm modulate of a constant block is an impulse") {
    OfdmConfig cfg;
    const CVector out = ofdm_modulate(CVector::Ones(32), cfg);
    REQUIRE(out.size() == 40);
    CHECK(std::abs(out[8] - std::sqrt(32.0)) < 1e-12);
    CHECK(out.segment(9, 31).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(out.head(8).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ofdm round trip, prefix and energy") {
    OfdmConfig cfg;
    Rng rng(3);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const CVector x = random_cvec(cfg.subcarriers, rng);
        const CVector t = ofdm_modulate(x, cfg);
        CHECK((t.head(cfg.cp_len) - t.segment(cfg.subcarriers, cfg.cp_len)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(std::abs(t.tail(cfg.subcarriers).norm() - x.norm()) < 1e-12);
        worst = std::max(worst, (ofdm_demodulate(t, cfg) - x).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12);
    CHECK(ofdm_demodulate(CVector::Zero(40), cfg).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ofdm dimension errors") {
    OfdmConfig cfg;
    CHECK_THROWS_AS(ofdm_modulate(CVector::Zero(31), cfg), DimensionError);
    CHECK_THROWS_AS(ofdm_demodulate(CVector::Zero(32), cfg), DimensionError);
}

TEST_CASE("config validation") {
    OfdmConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.symbol_len() == 40);
    cfg.cp_len = 7;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = OfdmConfig{};
    cfg.max_delay = 8;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("multipath with prefix is a per-subcarrier product") {
    // Oracle: direct linear convolution over [previous block | current block]
    // and a direct-sum DFT of the taps.
    OfdmConfig cfg;
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const CVector h = random_cvec(cfg.taps(), rng, 0.2);
        const CVector x = qpsk_modulate([&] {
            BitStream b(64);
            std::bernoulli_distribution coin;
            for (auto& v : b) v = coin(rng);
            return b;
        }());
        const CVector prev = testutil::random_cp_block(cfg.subcarriers, cfg.cp_len, rng);
        const CVector cur = ofdm_modulate(x, cfg);
        CVector both(prev.size() + cur.size());
        both << prev, cur;
        const CVector y = testutil::fir_convolve(both, h).tail(cur.size());
        const CVector Y = ofdm_demodulate(y, cfg);
        const CVector H = testutil::naive_dft(h, cfg.subcarriers);
        CHECK((Y - H.cwiseProduct(x)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((frequency_response(h, cfg.subcarriers) - H).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("zero forcing") {
    Rng rng(5);
    const CVector X = random_cvec(32, rng);
    CHECK((zf_equalize(X, CVector::Ones(32)).symbols - X).cwiseAbs().maxCoeff() == 0.0);

    const CVector H = random_cvec(32, rng);
    const ZfResult r = zf_equalize(H.cwiseProduct(X), H);
    CHECK((r.symbols - X).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.floored_bins == 0);

    CVector Hbad = H;
    Hbad[3] = cplx(0.0, 1e-14);
    Hbad[7] = 0.0;
    const ZfResult f = zf_equalize(X, Hbad);
    CHECK(f.floored_bins == 2);
    CHECK(f.symbols.allFinite());
    CHECK(std::abs(f.symbols[3] - X[3] / cplx(0.0, kZfFloor)) < 1e-3 * std::abs(f.symbols[3]));
    CHECK_THROWS_AS(zf_equalize(X, CVector::Ones(31)), DimensionError);
}

TEST_CASE("zf over a flat channel matches the analytic QPSK BER") {
    // Es/N0 = 8 dB per QPSK symbol, 1e6 bits, 3-sigma Monte Carlo band.
    OfdmConfig cfg;
    const double es_n0 = std::pow(10.0, 0.8);
    const double expected = testutil::qpsk_awgn_ber(es_n0);
    CVector h = CVector::Zero(cfg.taps());
    h[0] = 1.0;
    ChannelLine line(ChannelTaps::from_taps(h, cfg.cp_len), 1.0 / es_n0);
    const CVector H = frequency_response(h, cfg.subcarriers);
    Rng rng(8);
    long errors = 0, total = 0;
    while (total < 1000000) {
        const BitStream bits = random_bits(64, rng);
        const CVector rx = line.propagate(ofdm_modulate(qpsk_modulate(bits), cfg), rng);
        const BitStream dec = qpsk_demodulate(zf_equalize(ofdm_demodulate(rx, cfg), H).symbols);
        for (std::size_t i = 0; i < bits.size(); ++i) errors += dec[i] != bits[i];
        total += 64;
    }
    const double ber = static_cast<double>(errors) / total;
    const double sigma = std::sqrt(expected * (1 - expected) / total);
    CHECK(std::abs(ber - expected) < 3 * sigma);
}
