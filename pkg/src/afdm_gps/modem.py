"""AFDM modulator/demodulator with per-subcarrier pre-chirp values.

The transmit chain is ``s = Lc1^H F^H Lc2^H x`` with
``Lc = diag(exp(-2j*pi*c*n**2))``. ``Lc2`` may carry a different chirp
value on every subcarrier, which is what grouped pre-chirp selection tunes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from afdm_gps.numerics import dft_matrix, dft_unitary, idft_unitary


def compute_c1(alpha_max: int, n: int) -> float:
    """Smallest post-chirp value that separates all integer-Doppler paths."""
    if n < 1:
        raise ValueError("N must be positive")
    if alpha_max < 0:
        raise ValueError("alpha_max must be non-negative")
    return (2 * alpha_max + 1) / (2 * n)


@dataclass(frozen=True)
class AfdmConfig:
    n_subcarriers: int
    alpha_max: int = 1
    c1: float | None = None
    cpp_len: int = 0
    oversample: int = 4

    def __post_init__(self):
        if self.n_subcarriers < 1:
            raise ValueError("n_subcarriers must be positive")
        if not 0 <= self.cpp_len < self.n_subcarriers:
            raise ValueError("cpp_len must satisfy 0 <= cpp_len < N")
        if self.oversample < 1:
            raise ValueError("oversample must be >= 1")
        if self.c1 is None:
            object.__setattr__(self, "c1", compute_c1(self.alpha_max, self.n_subcarriers))

    @property
    def N(self) -> int:
        return self.n_subcarriers


@dataclass(frozen=True, eq=False)
class PreChirpProfile:
    """Pre-chirp value per subcarrier plus the group selection that produced it.

    ``pattern == "uniform"`` marks a conventional single-c2 profile; the
    grouping fields are then placeholders (V = W = 1).
    """

    c2_values: np.ndarray
    V: int = 1
    W: int = 1
    k: int | None = 2
    pattern: str = "uniform"
    selection: tuple[int, ...] = (1,)

    def __post_init__(self):
        c2 = np.array(self.c2_values, dtype=float)
        c2.setflags(write=False)
        object.__setattr__(self, "c2_values", c2)
        object.__setattr__(self, "selection", tuple(int(w) for w in self.selection))
        if len(self.selection) != self.V:
            raise ValueError("selection must hold one index per group")

    @property
    def N(self) -> int:
        return self.c2_values.size

    @classmethod
    def uniform(cls, n: int, c2: float) -> "PreChirpProfile":
        return cls(np.full(n, float(c2)))

    def __eq__(self, other):
        if not isinstance(other, PreChirpProfile):
            return NotImplemented
        return (
            np.array_equal(self.c2_values, other.c2_values)
            and (self.V, self.W, self.k, self.pattern, self.selection)
            == (other.V, other.W, other.k, other.pattern, other.selection)
        )

    def to_dict(self) -> dict:
        d = {
            "N": self.N,
            "V": self.V,
            "pattern": self.pattern,
            "W": self.W,
            "k": self.k,
            "selection": list(self.selection),
        }
        if self.pattern == "uniform":
            d["c2"] = float(self.c2_values[-1])
        return d


def default_c2(n: int) -> float:
    """Uniform pre-chirp for conventional AFDM: irrational and below 1/(2N)."""
    return 1.0 / (2.0 * np.pi * n)


@dataclass(frozen=True)
class TimeBlock:
    samples: np.ndarray
    has_cpp: bool = False
    cpp_len: int = 0

    def __post_init__(self):
        if self.has_cpp != (self.cpp_len > 0):
            raise ValueError("has_cpp must match cpp_len > 0")

    def __len__(self):
        return self.samples.shape[-1]


def chirp_diag(c, n: int) -> np.ndarray:
    """Diagonal of Lc, ``exp(-2j*pi*c*m**2)``; ``c`` may be per-index."""
    m = np.arange(n, dtype=float)
    return np.exp(-2j * np.pi * np.asarray(c, dtype=float) * m * m)


def _check_len(x: np.ndarray, n: int, what: str) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] != n:
        raise ValueError(f"{what} has length {x.shape[-1]}, expected {n}")
    return x


def idaft(x: np.ndarray, c1: float, c2_values: np.ndarray) -> np.ndarray:
    """Inverse DAFT along the last axis (diagonal, inverse FFT, diagonal).

    ``c2_values`` may be stacked ``(..., N)`` to give each block its own profile.
    """
    c2_values = np.asarray(c2_values, dtype=float)
    n = c2_values.shape[-1]
    x = _check_len(x, n, "symbol vector")
    return idft_unitary(x * chirp_diag(c2_values, n).conj()) * chirp_diag(c1, n).conj()


def daft(r: np.ndarray, c1: float, c2_values: np.ndarray) -> np.ndarray:
    """Forward DAFT along the last axis, ``A @ r``."""
    c2_values = np.asarray(c2_values, dtype=float)
    n = c2_values.shape[-1]
    r = _check_len(r, n, "received block")
    return dft_unitary(r * chirp_diag(c1, n)) * chirp_diag(c2_values, n)


def build_daft_matrix(c1: float, c2_values) -> np.ndarray:
    """Dense DAFT matrix ``A = Lc2 F Lc1``."""
    c2_values = np.asarray(c2_values, dtype=float)
    if c2_values.ndim != 1 or c2_values.size == 0:
        raise ValueError("c2_values must be a non-empty vector")
    n = c2_values.size
    return chirp_diag(c2_values, n)[:, None] * dft_matrix(n) * chirp_diag(c1, n)[None, :]


def afdm_modulate(x: np.ndarray, c1: float, profile: PreChirpProfile) -> TimeBlock:
    return TimeBlock(idaft(x, c1, profile.c2_values))


def afdm_demodulate(r: TimeBlock | np.ndarray, c1: float, profile: PreChirpProfile) -> np.ndarray:
    if isinstance(r, TimeBlock):
        if r.has_cpp:
            raise ValueError("remove the chirp-periodic prefix before demodulating")
        r = r.samples
    return daft(r, c1, profile.c2_values)


def add_cpp(s: TimeBlock, cpp_len: int, c1: float) -> TimeBlock:
    """Prepend a chirp-periodic prefix of ``cpp_len`` samples."""
    if s.has_cpp:
        raise ValueError("block already carries a prefix")
    n = len(s)
    if not 0 <= cpp_len < n:
        raise ValueError("cpp_len must satisfy 0 <= cpp_len < N")
    if cpp_len == 0:
        return s
    q = np.arange(cpp_len, 0, -1)
    phase = np.exp(-2j * np.pi * c1 * (n * n - 2 * n * q))
    prefix = s.samples[..., n - q] * phase
    return TimeBlock(np.concatenate([prefix, s.samples], axis=-1), True, cpp_len)


def remove_cpp(r: TimeBlock) -> TimeBlock:
    if not r.has_cpp:
        return r
    return TimeBlock(r.samples[..., r.cpp_len:])
