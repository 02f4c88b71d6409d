"""Slow reference computations: direct sums and explicit matrices.

Nothing here touches the FFT fast paths, so these serve as independent
checks for ``afdm selftest`` and the test suite.
"""

from __future__ import annotations

import itertools

import numpy as np

from afdm_gps.gps import make_groups, omega_values


def direct_modulate(x, c1: float, c2_values, times=None) -> np.ndarray:
    """Chirp-subcarrier double sum evaluated at (possibly fractional) instants."""
    x = np.asarray(x, dtype=complex)
    c2 = np.asarray(c2_values, dtype=float)
    n = x.size
    t = np.arange(n, dtype=float) if times is None else np.asarray(times, dtype=float)
    out = np.zeros(t.size, dtype=complex)
    for i, ti in enumerate(t):
        acc = 0j
        for m in range(n):
            acc += x[m] * np.exp(2j * np.pi * (c1 * ti * ti + c2[m] * m * m + m * ti / n))
        out[i] = acc / np.sqrt(n)
    return out


def direct_dft_matrix(n: int) -> np.ndarray:
    f = np.empty((n, n), dtype=complex)
    for r in range(n):
        for c in range(n):
            f[r, c] = np.exp(-2j * np.pi * r * c / n) / np.sqrt(n)
    return f


def _papr(s: np.ndarray) -> float:
    p = np.abs(s) ** 2
    return float(p.max() / p.mean())


def _oversampled_idft(n: int, L: int) -> np.ndarray:
    # rows: instants t = q/L; columns: subcarriers
    t = np.arange(L * n)[:, None] / L
    m = np.arange(n)[None, :]
    return np.exp(2j * np.pi * m * t / n) / np.sqrt(n)


def _candidate_c2(n, V, W, k, pattern, selection):
    groups = make_groups(n, V, pattern)
    c2 = np.zeros(n)
    for m in range(1, n):
        c2[m] = omega_values(m, W, k)[selection[groups[m] - 1] - 1]
    return c2


def _matrix_papr(x, c1, c2, L):
    n = len(x)
    lam2_h = np.diag(np.exp(2j * np.pi * c2 * np.arange(n) ** 2))
    t = np.arange(L * n) / L
    lam1_h = np.diag(np.exp(2j * np.pi * c1 * t * t))
    return _papr(lam1_h @ _oversampled_idft(n, L) @ lam2_h @ x)


def gps_matrix_reference(x, c1, V, W, k=2, pattern="adjacent", L=1):
    """Group-by-group greedy selection with explicit diagonal matrices.

    Returns ``(selection, papr_min, trace)`` where ``trace`` lists every
    PAPR evaluated, in order.
    """
    n = len(x)
    selection = [1] * V
    papr_min = _matrix_papr(x, c1, _candidate_c2(n, V, W, k, pattern, selection), L)
    trace = [papr_min]
    for g in range(V):
        for w in range(2, W + 1):
            trial = list(selection)
            trial[g] = w
            p = _matrix_papr(x, c1, _candidate_c2(n, V, W, k, pattern, trial), L)
            trace.append(p)
            if p < papr_min:
                selection, papr_min = trial, p
    return tuple(selection), papr_min, trace


def brute_force_reference(x, c1, V, W, k=2, pattern="adjacent", L=1):
    """Best selection over all ``W**V`` tuples using the direct double sum."""
    n = len(x)
    times = np.arange(L * n) / L
    best = (np.inf, None)
    for combo in itertools.product(range(1, W + 1), repeat=V):
        p = _papr(direct_modulate(x, c1, _candidate_c2(n, V, W, k, pattern, combo), times))
        if p < best[0]:
            best = (p, combo)
    return best[1], best[0]


def direct_otfs(symbols) -> np.ndarray:
    """Full ISFFT followed by a rectangular-pulse Heisenberg transform."""
    x = np.asarray(symbols, dtype=complex)
    n_dop, m_del = x.shape
    tf = np.zeros((n_dop, m_del), dtype=complex)
    for n in range(n_dop):
        for m in range(m_del):
            acc = 0j
            for k in range(n_dop):
                for l in range(m_del):
                    acc += x[k, l] * np.exp(2j * np.pi * (n * k / n_dop - m * l / m_del))
            tf[n, m] = acc / np.sqrt(n_dop * m_del)
    s = np.zeros(n_dop * m_del, dtype=complex)
    for n in range(n_dop):
        for q in range(m_del):
            s[n * m_del + q] = sum(tf[n, m] * np.exp(2j * np.pi * m * q / m_del) for m in range(m_del)) / np.sqrt(m_del)
    return s


def direct_time_channel(s_with_prefix, paths, n: int, cpp_len: int) -> np.ndarray:
    """Per-sample multipath output on the prefix-free window.

    ``r[q] = sum_p h_p exp(-2j pi f_p q / N) s_cpp[q - l_p]`` where the
    prefix supplies the samples before the block start.
    """
    s = np.asarray(s_with_prefix, dtype=complex)
    r = np.zeros(n, dtype=complex)
    for q in range(n):
        for p in paths:
            r[q] += p.gain * np.exp(-2j * np.pi * p.doppler * q / n) * s[cpp_len + q - p.delay]
    return r
