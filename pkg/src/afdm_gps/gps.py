"""Grouped pre-chirp selection (GPS) and the exhaustive group enumeration.

Subcarriers are split into ``V`` equal groups. Every subcarrier ``m >= 1``
has ``W`` candidate pre-chirp values; all subcarriers of a group use the
same candidate index. GPS walks the groups once and keeps a candidate
only when it strictly lowers the block PAPR, costing ``1 + V*(W-1)``
PAPR evaluations. The chosen indices travel as ``ceil(log2(W**V))``
side bits.

Selection indices are 1-based in the public API (``w = 1..W``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import floor, pi

import numpy as np

from afdm_gps.modem import AfdmConfig, PreChirpProfile
from afdm_gps.papr import PaprSample, oversampled_time_signal, papr_of_signal

PATTERNS = ("adjacent", "comb")
DEFAULT_ENUM_BUDGET = 2**20


class EnumerationBudgetError(ValueError):
    pass


def irrational_ratio(k: int | None) -> float:
    """``pi*10**k / floor(pi*10**k)``; ``k=None`` gives the exact rational design (1.0)."""
    if k is None:
        return 1.0
    if k < 0:
        raise ValueError("k must be non-negative")
    scaled = pi * 10**k
    return scaled / floor(scaled)


def omega_values(m: int, W: int, k: int | None = 2) -> list[float]:
    """Candidate pre-chirp values for subcarrier ``m``.

    For ``W == 2`` the pair is ``+/- r/(4 m^2)``; otherwise
    ``(w - 1/2) r / (W m^2)``, ``w = 1..W``, with ``r = irrational_ratio(k)``.
    Either way neighbouring candidates are ``2*pi*r/W`` apart in phase.
    """
    if m < 1:
        raise ValueError("subcarrier 0 has no candidate set")
    if W < 1:
        raise ValueError("W must be >= 1")
    r = irrational_ratio(k)
    m2 = m * m
    if W == 2:
        return [r / (4 * m2), -r / (4 * m2)]
    return [(w - 0.5) * r / (W * m2) for w in range(1, W + 1)]


def omega_table(n: int, W: int, k: int | None = 2) -> np.ndarray:
    """``(N, W)`` table of candidate values; row 0 is all zeros."""
    table = np.zeros((n, W))
    for m in range(1, n):
        table[m] = omega_values(m, W, k)
    return table


def make_groups(n: int, V: int, pattern: str = "adjacent") -> np.ndarray:
    """1-based group index of every subcarrier."""
    if V < 1 or n % V:
        raise ValueError(f"V={V} does not divide N={n}")
    m = np.arange(n)
    if pattern == "adjacent":
        return m // (n // V) + 1
    if pattern == "comb":
        return m % V + 1
    raise ValueError(f"unknown grouping pattern {pattern!r}")


def profile_from_selection(n: int, V: int, W: int, k: int | None, pattern: str, selection) -> PreChirpProfile:
    selection = tuple(int(w) for w in selection)
    if len(selection) != V:
        raise ValueError("selection must hold one index per group")
    if any(not 1 <= w <= W for w in selection):
        raise ValueError(f"selection indices must lie in [1, {W}]")
    groups = make_groups(n, V, pattern) - 1
    w_idx = np.asarray(selection)[groups] - 1
    c2 = omega_table(n, W, k)[np.arange(n), w_idx]
    return PreChirpProfile(c2, V=V, W=W, k=k, pattern=pattern, selection=selection)


def profile_from_dict(d: dict) -> PreChirpProfile:
    """Rebuild a profile from its JSON description (bit-exact c2 values)."""
    if d["pattern"] == "uniform":
        return PreChirpProfile.uniform(int(d["N"]), float(d["c2"]))
    return profile_from_selection(int(d["N"]), int(d["V"]), int(d["W"]), d.get("k"), d["pattern"], d["selection"])


def side_bit_count(V: int, W: int) -> int:
    """``ceil(log2(W**V))`` in exact integer arithmetic."""
    return (W**V - 1).bit_length()


def side_bits_encode(selection, W: int) -> np.ndarray:
    """Mixed-radix code of the selection, most significant group first."""
    selection = [int(w) for w in selection]
    if any(not 1 <= w <= W for w in selection):
        raise ValueError(f"selection indices must lie in [1, {W}]")
    value = 0
    for w in selection:
        value = value * W + (w - 1)
    nbits = side_bit_count(len(selection), W)
    return np.array([(value >> (nbits - 1 - i)) & 1 for i in range(nbits)], dtype=np.uint8)


def side_bits_decode(bits, V: int, W: int) -> tuple[int, ...]:
    bits = np.asarray(bits, dtype=np.int64).ravel()
    nbits = side_bit_count(V, W)
    if bits.size != nbits or np.any((bits != 0) & (bits != 1)):
        raise ValueError(f"expected {nbits} side bits")
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    if value >= W**V:
        raise ValueError("side bits encode an out-of-range selection")
    digits = []
    for _ in range(V):
        value, d = divmod(value, W)
        digits.append(d + 1)
    return tuple(reversed(digits))


@dataclass(frozen=True)
class GpsResult:
    papr_min: PaprSample
    papr_initial: PaprSample
    profile: PreChirpProfile
    side_bits: np.ndarray
    n_evaluations: int


@dataclass(frozen=True)
class BatchSelection:
    """Per-block outcome of a selection run over a stack of blocks."""

    selection: np.ndarray  # (B, V), 1-based
    papr_min: np.ndarray  # (B,), linear
    papr_initial: np.ndarray  # (B,), linear
    n_evaluations: int


class _Evaluator:
    def __init__(self, xs, c1, n, V, W, k, pattern, L):
        self.xs = np.asarray(xs, dtype=complex)
        if self.xs.shape[-1] != n:
            raise ValueError(f"blocks have length {self.xs.shape[-1]}, expected {n}")
        self.c1 = c1
        self.L = L
        self.table = omega_table(n, W, k)
        self.groups = make_groups(n, V, pattern) - 1
        self.rows = np.arange(n)
        self.count = 0

    def __call__(self, sel0: np.ndarray) -> np.ndarray:
        # sel0: (B, V) zero-based candidate indices
        c2 = self.table[self.rows, sel0[:, self.groups]]
        self.count += 1
        return papr_of_signal(oversampled_time_signal(self.xs, self.c1, c2, self.L))


def gps_select_batch(xs, c1: float, V: int, W: int, pattern: str = "adjacent", L_select: int = 4, k: int | None = 2) -> BatchSelection:
    xs = np.atleast_2d(np.asarray(xs, dtype=complex))
    n = xs.shape[-1]
    ev = _Evaluator(xs, c1, n, V, W, k, pattern, L_select)
    sel = np.zeros((xs.shape[0], V), dtype=np.int64)
    initial = ev(sel)
    best = initial.copy()
    for g in range(V):
        for w in range(1, W):
            trial = sel.copy()
            trial[:, g] = w
            p = ev(trial)
            keep = p < best
            sel[keep, g] = w
            best = np.where(keep, p, best)
    return BatchSelection(sel + 1, best, initial, ev.count)


def enumerate_optimal_batch(xs, c1: float, V: int, W: int, pattern: str = "adjacent", L_select: int = 4, k: int | None = 2, budget: int = DEFAULT_ENUM_BUDGET) -> BatchSelection:
    if W**V > budget:
        raise EnumerationBudgetError(
            f"W**V = {W**V} candidates exceed the enumeration budget {budget}; use GPS instead"
        )
    xs = np.atleast_2d(np.asarray(xs, dtype=complex))
    n = xs.shape[-1]
    ev = _Evaluator(xs, c1, n, V, W, k, pattern, L_select)
    b = xs.shape[0]
    initial = ev(np.zeros((b, V), dtype=np.int64))
    best = np.full(b, np.inf)
    sel = np.zeros((b, V), dtype=np.int64)
    # lexicographic order + strict comparison keeps the smallest tuple on ties
    for combo in itertools.product(range(W), repeat=V):
        trial = np.broadcast_to(np.asarray(combo), (b, V))
        p = ev(trial)
        keep = p < best
        sel[keep] = combo
        best = np.where(keep, p, best)
    return BatchSelection(sel + 1, best, initial, ev.count)


def _single(batch: BatchSelection, n, V, W, k, pattern, L) -> GpsResult:
    selection = tuple(int(w) for w in batch.selection[0])
    return GpsResult(
        papr_min=PaprSample(float(batch.papr_min[0]), L),
        papr_initial=PaprSample(float(batch.papr_initial[0]), L),
        profile=profile_from_selection(n, V, W, k, pattern, selection),
        side_bits=side_bits_encode(selection, W),
        n_evaluations=batch.n_evaluations,
    )


def gps_select(x, config: AfdmConfig, V: int, W: int, pattern: str = "adjacent", L_select: int | None = None, k: int | None = 2) -> GpsResult:
    """Greedy one-pass group selection for a single block."""
    L = config.oversample if L_select is None else L_select
    batch = gps_select_batch(np.asarray(x)[None], config.c1, V, W, pattern, L, k)
    return _single(batch, config.N, V, W, k, pattern, L)


def enumerate_optimal(x, config: AfdmConfig, V: int, W: int, pattern: str = "adjacent", L_select: int | None = None, k: int | None = 2, budget: int = DEFAULT_ENUM_BUDGET) -> GpsResult:
    """Best of all ``W**V`` group selections; ties go to the smallest tuple."""
    L = config.oversample if L_select is None else L_select
    batch = enumerate_optimal_batch(np.asarray(x)[None], config.c1, V, W, pattern, L, k, budget)
    return _single(batch, config.N, V, W, k, pattern, L)
