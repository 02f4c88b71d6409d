"""PAPR with oversampling, empirical CCDF, and the analytic peak-power law."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from afdm_gps.modem import PreChirpProfile, chirp_diag, idaft


@dataclass(frozen=True)
class PaprSample:
    papr_linear: float
    oversample: int = 1

    @property
    def papr_db(self) -> float:
        return 10.0 * np.log10(self.papr_linear)


@dataclass(frozen=True)
class CcdfCurve:
    thresholds_db: np.ndarray
    probabilities: np.ndarray
    n_trials: int


def _c2_of(profile) -> np.ndarray:
    if isinstance(profile, PreChirpProfile):
        return profile.c2_values
    return np.asarray(profile, dtype=float)


def oversampled_time_signal(x: np.ndarray, c1: float, profile, L: int) -> np.ndarray:
    """Evaluate the modulated signal at instants ``t = n/L``, ``n < L*N``.

    The pre-chirped symbols occupy spectral bins 0..N-1 only, so the
    de-post-chirped waveform is interpolated exactly by zero-padding its
    spectrum; the post-chirp phase is then applied at the fractional instants.
    Works along the last axis.
    """
    if L < 1:
        raise ValueError("oversampling factor must be >= 1")
    c2 = _c2_of(profile)
    n = c2.shape[-1]
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] != n:
        raise ValueError(f"symbol vector has length {x.shape[-1]}, expected {n}")
    if L == 1:
        return idaft(x, c1, c2)
    spec = np.zeros(x.shape[:-1] + (L * n,), dtype=complex)
    spec[..., :n] = x * chirp_diag(c2, n).conj()
    u = np.fft.ifft(spec, axis=-1) * (L * n / np.sqrt(n))
    t = np.arange(L * n) / L
    return u * np.exp(2j * np.pi * c1 * t * t)


def papr_of_signal(s: np.ndarray) -> np.ndarray:
    """Peak-to-mean power ratio along the last axis (linear)."""
    p = np.abs(s) ** 2
    return p.max(axis=-1) / p.mean(axis=-1)


def papr(x: np.ndarray, c1: float, profile, L: int = 4) -> PaprSample:
    """PAPR of one block measured on ``L``-times oversampled samples."""
    value = papr_of_signal(oversampled_time_signal(x, c1, profile, L))
    return PaprSample(float(value), L)


def to_db(values) -> np.ndarray:
    return 10.0 * np.log10(np.asarray(values, dtype=float))


def _samples_db(samples) -> np.ndarray:
    if len(samples) and isinstance(samples[0], PaprSample):
        return np.array([s.papr_db for s in samples])
    return np.asarray(samples, dtype=float)


def ccdf(samples: Sequence[PaprSample] | np.ndarray, thresholds_db) -> CcdfCurve:
    """Fraction of samples strictly above each threshold.

    ``samples`` is a sequence of :class:`PaprSample` or an array of PAPR
    values already in dB.
    """
    db = _samples_db(samples)
    if db.size == 0:
        raise ValueError("CCDF needs at least one sample")
    thr = np.sort(np.asarray(thresholds_db, dtype=float))
    sorted_db = np.sort(db)
    above = db.size - np.searchsorted(sorted_db, thr, side="right")
    return CcdfCurve(thr, above / db.size, int(db.size))


def papr_at_ccdf(samples, prob: float) -> float:
    """Smallest sample value whose exceedance fraction is at most ``prob``."""
    db = np.sort(_samples_db(samples))[::-1]
    if db.size == 0:
        raise ValueError("need at least one sample")
    j = int(np.floor(prob * db.size + 1e-9))
    return float(db[min(j, db.size - 1)])


def _peak_scale(n: int) -> float:
    if n < 2:
        raise ValueError("N must be >= 2")
    return n * np.sqrt(np.pi / 3.0 * np.log(n))


def analytic_peak_cdf(gamma, n: int):
    """Approximate CDF of the block peak power for unit average power."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ValueError("gamma must be non-negative")
    out = np.exp(-np.exp(-gamma) * _peak_scale(n))
    return float(out) if out.ndim == 0 else out


def analytic_papr_at_ccdf(prob: float, n: int) -> float:
    """Threshold (dB) at which ``1 - analytic_peak_cdf`` equals ``prob``."""
    gamma = -np.log(-np.log1p(-prob) / _peak_scale(n))
    return float(10.0 * np.log10(gamma))


def candidate_correlation(n: int, phase_delta: float) -> complex:
    """Model correlation of two candidates that differ on one subcarrier."""
    if n < 2:
        raise ValueError("N must be >= 2")
    return (n - 1 + np.exp(1j * phase_delta)) / n


def empirical_correlation(s1: np.ndarray, s2: np.ndarray) -> complex:
    """Sample correlation coefficient of two zero-mean signal ensembles."""
    s1 = np.ravel(s1)
    s2 = np.ravel(s2)
    num = np.mean(s1 * s2.conj())
    return complex(num / np.sqrt(np.mean(np.abs(s1) ** 2) * np.mean(np.abs(s2) ** 2)))
