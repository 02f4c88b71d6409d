import numpy as np
import pytest

from afdm_gps.gps import profile_from_selection
from afdm_gps.modem import PreChirpProfile, afdm_modulate, build_daft_matrix, compute_c1
from afdm_gps.numerics import random_qam16
from afdm_gps.oracles import direct_modulate
from afdm_gps.papr import (
    PaprSample,
    analytic_papr_at_ccdf,
    analytic_peak_cdf,
    candidate_correlation,
    ccdf,
    empirical_correlation,
    oversampled_time_signal,
    papr,
    papr_at_ccdf,
    papr_of_signal,
)

N = 64
C1 = compute_c1(1, N)


def _gps_profile(n=N):
    return profile_from_selection(n, 4, 2, 2, "adjacent", (1, 2, 1, 2))


@pytest.mark.parametrize("m", [0, 5, 63])
@pytest.mark.parametrize("L", [1, 4])
def test_single_subcarrier_has_unit_papr(m, L):
    assert papr(np.eye(N)[m], C1, _gps_profile(), L).papr_linear == pytest.approx(1.0, abs=1e-12)


def test_impulse_papr_equals_n():
    p = papr(np.ones(N), 0.0, PreChirpProfile.uniform(N, 0.0), L=1)
    assert p.papr_linear == pytest.approx(N, rel=1e-12)
    assert p.papr_db == pytest.approx(18.0618, abs=1e-4)


def test_oversampled_papr_not_smaller(rng):
    prof = _gps_profile()
    _, xs = random_qam16(rng, (500, N))
    p1 = papr_of_signal(oversampled_time_signal(xs, C1, prof, 1))
    p4 = papr_of_signal(oversampled_time_signal(xs, C1, prof, 4))
    assert np.all(p4 >= p1 * (1 - 1e-12))


def test_l1_equals_explicit_matrix_ratio(rng):
    prof = _gps_profile()
    _, x = random_qam16(rng, N)
    s = build_daft_matrix(C1, prof.c2_values).conj().T @ x
    ref = np.max(np.abs(s) ** 2) / np.mean(np.abs(s) ** 2)
    assert papr(x, C1, prof, L=1).papr_linear == pytest.approx(ref, rel=1e-10)


def test_oversampled_signal_properties(rng):
    n, L = 16, 4
    c1 = compute_c1(1, n)
    prof = _gps_profile(n)
    _, x = random_qam16(rng, n)
    s4 = oversampled_time_signal(x, c1, prof, L)
    np.testing.assert_allclose(s4[::L], afdm_modulate(x, c1, prof).samples, atol=1e-9)
    ref = direct_modulate(x, c1, prof.c2_values, np.arange(L * n) / L)
    assert np.max(np.abs(s4 - ref)) <= 1e-9
    assert np.sum(np.abs(s4) ** 2) == pytest.approx(L * np.sum(np.abs(x) ** 2), rel=1e-9)


def test_oversampling_factor_validated():
    with pytest.raises(ValueError):
        papr(np.ones(8), 0.1, PreChirpProfile.uniform(8, 0.0), L=0)


def test_ccdf_step_cases():
    samples = [PaprSample(10 ** 0.6)] * 5
    assert ccdf(samples, [5.0]).probabilities[0] == 1.0
    assert ccdf(samples, [7.0]).probabilities[0] == 0.0
    with pytest.raises(ValueError):
        ccdf([], [1.0])


def test_ccdf_monotone(rng):
    cur = ccdf(rng.normal(8, 1, 1000), np.linspace(0, 14, 141))
    assert np.all(np.diff(cur.probabilities) <= 0)
    assert cur.probabilities[0] <= 1 and cur.probabilities[-1] >= 0


def test_papr_at_ccdf_convention():
    db = np.arange(1000, dtype=float)  # 999 largest
    assert papr_at_ccdf(db, 1e-2) == 989.0
    assert np.mean(db > papr_at_ccdf(db, 1e-2)) <= 1e-2


def test_analytic_peak_cdf_limits_and_monotone():
    assert analytic_peak_cdf(30.0, 64) == pytest.approx(1.0, abs=1e-10)
    assert analytic_peak_cdf(0.0, 64) == pytest.approx(np.exp(-64 * np.sqrt(np.pi / 3 * np.log(64))), abs=1e-30)
    assert analytic_peak_cdf(0.0, 64) < 1e-30
    grid = analytic_peak_cdf(np.linspace(0, 20, 100), 64)
    assert np.all(np.diff(grid) >= 0)
    with pytest.raises(ValueError):
        analytic_peak_cdf(1.0, 1)


def test_analytic_inverse():
    t = analytic_papr_at_ccdf(1e-2, 64)
    assert 1 - analytic_peak_cdf(10 ** (t / 10), 64) == pytest.approx(1e-2, rel=1e-9)


def test_candidate_correlation_formula():
    assert candidate_correlation(64, np.pi) == pytest.approx(62 / 64)
    assert candidate_correlation(64, 0.0) == pytest.approx(1.0)
    assert abs(candidate_correlation(10, np.pi / 2)) > 8 / 10


def test_empirical_correlation_one_flipped_subcarrier():
    rng = np.random.default_rng(77)
    m0 = 9
    _, xs = random_qam16(rng, (10_000, N))
    x2 = xs.copy()
    x2[:, m0] *= -1  # the pi phase step of the correlation-optimal design
    rho = empirical_correlation(afdm_modulate(xs, C1, _gps_profile()).samples, afdm_modulate(x2, C1, _gps_profile()).samples)
    assert abs(rho - candidate_correlation(N, np.pi)) < 0.01
