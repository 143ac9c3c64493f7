import math

import numpy as np
import pytest

import blindchan as bc


def test_qpsk_roundtrip():
    bits = np.random.default_rng(1).integers(0, 2, 64).astype(np.uint8).tolist()
    assert bc.qpsk_demodulate(bc.qpsk_modulate(bits)) == bits


def test_ofdm_roundtrip_and_unitary_dft():
    x = np.random.default_rng(2).standard_normal(32) + 1j * np.random.default_rng(3).standard_normal(32)
    np.testing.assert_allclose(bc.dft_unitary(x), np.fft.fft(x) / math.sqrt(32), atol=1e-12)
    tx = bc.ofdm_modulate(x)
    assert tx.shape == (40,)
    np.testing.assert_allclose(tx[:8], tx[-8:])
    np.testing.assert_allclose(bc.ofdm_demodulate(tx), x, atol=1e-12)


def test_analytic_statistics_identify_channel():
    h = bc.draw_channel(seed=11)
    R = bc.analytic_autocorr(h, 0.1)
    assert R.shape == (72, 72)
    eig = np.linalg.eigvalsh(R)
    np.testing.assert_allclose(eig[:8], 0.1, atol=1e-9)
    est = bc.estimate_from_autocorr(R)
    assert bc.aligned_nmse(est.taps, h) < 1e-8
    assert bc.rank_check(R).valid


def test_channel_matrix_shape_and_rank_caveat():
    H = bc.build_channel_matrix(bc.draw_channel(seed=4))
    assert H.shape == (72, 64)
    diag = bc.rank_check(H @ H.conj().T)
    assert not diag.valid
    assert diag.numerical_rank <= 64


def test_simo_oracle():
    rng = np.random.default_rng(5)
    taps = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    F = bc.simo_filtering_matrix(taps, 5)
    R = F @ F.conj().T + 0.01 * np.eye(F.shape[0])
    est = bc.simo_subspace_estimate(2, 2, 5, R)
    assert bc.aligned_nmse(est.flatten(order="F"), taps.flatten(order="F")) < 1e-8


def test_invalid_config_raises():
    s = bc.Scenario()
    s.set("ff", "1.5")
    with pytest.raises(ValueError):
        s.validate()
    with pytest.raises(ValueError):
        s.set("snr", "0:0:10")
    with pytest.raises(ValueError):
        bc.preset("nope")


def test_preset_run_is_deterministic_csv():
    e = bc.preset("fig13")
    for c in e.curves:
        c.trials = 3
        c.snr_grid_db = [10.0, 20.0]
    a = bc.format_csv(bc.run_experiment(e))
    b = bc.format_csv(bc.run_experiment(e))
    assert a == b
    lines = a.strip().splitlines()
    assert lines[0] == bc.CSV_HEADER
    assert len(lines) == 1 + 3 * 2
