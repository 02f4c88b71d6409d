import numpy as np
import pytest

from afdm_gps.channel import ChannelScenario, LtvChannel, PathSpec, awgn, build_heff, build_time_channel
from afdm_gps.gps import gps_select, side_bits_encode
from afdm_gps.modem import AfdmConfig, afdm_modulate, add_cpp, TimeBlock
from afdm_gps.numerics import random_qam16
from afdm_gps.receiver import SingularChannelError, ber_count, mmse_equalize, recover_bits, send_side_bits

from conftest import crandn

CFG = AfdmConfig(64, alpha_max=1, cpp_len=2)


def test_mmse_identity_cases(rng):
    y = crandn(rng, 8)
    np.testing.assert_allclose(mmse_equalize(y, np.eye(8), 0.0), y, atol=1e-15)
    np.testing.assert_allclose(mmse_equalize(y, np.eye(8), 1.0), y / 2, atol=1e-15)


def test_mmse_near_zf_recovers_symbols(rng):
    h = crandn(rng, 16, 16)
    x = crandn(rng, 16)
    x_hat = mmse_equalize(h @ x, h, 1e-8)
    np.testing.assert_allclose(x_hat, np.linalg.solve(h, h @ x), atol=1e-4)
    np.testing.assert_allclose(x_hat, x, atol=1e-4)


def test_mmse_rejects_singular_noiseless():
    h = np.zeros((4, 4))
    h[0, 0] = 1
    with pytest.raises(SingularChannelError):
        mmse_equalize(np.ones(4), h, 0.0)
    with pytest.raises(ValueError):
        mmse_equalize(np.ones(4), np.ones((4, 3)), 0.1)


def test_mmse_mse_decreases_with_snr(rng):
    h = crandn(rng, 32, 32)
    _, x = random_qam16(rng, (32, 400))
    w = crandn(rng, 32, 400)
    mse = []
    for snr_db in (0, 5, 10, 15, 20):
        n0 = 10 ** (-snr_db / 10)
        x_hat = mmse_equalize(h @ x + np.sqrt(n0) * w, h, n0)
        mse.append(np.mean(np.abs(x_hat - x) ** 2))
    assert np.all(np.diff(mse) < 0)


def test_ber_count():
    a = np.array([0, 1, 1, 0, 1], dtype=np.uint8)
    assert ber_count(a, a) == (0, 5)
    assert ber_count(a, 1 - a) == (5, 5)
    b = a.copy()
    b[2] ^= 1
    assert ber_count(a, b) == (1, 5)
    with pytest.raises(ValueError):
        ber_count(a, a[:4])


def _tx(rng, V=4, W=2):
    bits, x = random_qam16(rng, 64)
    res = gps_select(x, CFG, V=V, W=W)
    return bits, res


def test_noiseless_identity_channel_recovers_bits(rng):
    ident = LtvChannel((PathSpec(1.0, 0, 0.0),), 64)
    for _ in range(5):
        bits, res = _tx(rng)
        s = afdm_modulate(_symbols(bits), CFG.c1, res.profile)
        rx = recover_bits(add_cpp(s, CFG.cpp_len, CFG.c1), res.side_bits, ident, CFG, V=4, W=2)
        assert ber_count(bits, rx) == (0, 256)


def _symbols(bits):
    from afdm_gps.numerics import qam16_map

    return qam16_map(bits)


def _good_channel(rng):
    scen = ChannelScenario()
    while True:
        ch = scen.draw(64, rng)
        if np.linalg.svd(build_time_channel(ch, CFG.c1), compute_uv=False)[-1] > 0.05:
            return ch


def test_noiseless_multipath_recovers_bits(rng):
    for _ in range(5):
        ch = _good_channel(rng)
        bits, res = _tx(rng, V=8, W=3)
        r = build_time_channel(ch, CFG.c1) @ afdm_modulate(_symbols(bits), CFG.c1, res.profile).samples
        rx = recover_bits(r, res.side_bits, ch, CFG, V=8, W=3)
        assert ber_count(bits, rx)[0] == 0


def test_genie_equals_correct_side_bits_and_wrong_bits_hurt(rng):
    n0 = 10 ** (-20 / 10)
    wrong_total = right_total = 0
    for _ in range(20):
        ch = _good_channel(rng)
        bits, res = _tx(rng)
        r = awgn(build_time_channel(ch, CFG.c1) @ afdm_modulate(_symbols(bits), CFG.c1, res.profile).samples, n0, rng)
        with_bits = recover_bits(r, res.side_bits, ch, CFG, V=4, W=2, n0=n0)
        genie = recover_bits(r, None, ch, CFG, V=4, W=2, n0=n0, profile=res.profile)
        np.testing.assert_array_equal(with_bits, genie)
        bad = side_bits_encode(tuple(3 - w for w in res.profile.selection), 2)
        wrong = recover_bits(r, bad, ch, CFG, V=4, W=2, n0=n0)
        right_total += ber_count(bits, with_bits)[0]
        wrong_total += ber_count(bits, wrong)[0]
    assert wrong_total > right_total + 100


def test_malformed_side_bits(rng):
    bits, res = _tx(rng)
    with pytest.raises(ValueError):
        recover_bits(np.zeros(64), [1, 0, 1], LtvChannel((PathSpec(1.0, 0, 0.0),), 64), CFG, V=4, W=2)


def test_side_bits_survive_clean_link(rng):
    ch = _good_channel(rng)
    tx = np.array([1, 0, 1, 1], dtype=np.uint8)
    np.testing.assert_array_equal(send_side_bits(tx, ch, CFG, 1e-4, rng), tx)
