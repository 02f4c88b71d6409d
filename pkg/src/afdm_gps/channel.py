"""Doubly dispersive multipath channel and AWGN.

Doppler is normalized to the subcarrier spacing, so a path with Doppler
``f`` multiplies sample ``n`` by ``exp(-2j*pi*f*n/N)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from afdm_gps.modem import PreChirpProfile, build_daft_matrix


@dataclass(frozen=True)
class PathSpec:
    gain: complex
    delay: int
    doppler: float


@dataclass(frozen=True)
class LtvChannel:
    paths: tuple[PathSpec, ...]
    N: int

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        if not self.paths:
            raise ValueError("channel needs at least one path")
        for p in self.paths:
            if not 0 <= p.delay < self.N:
                raise ValueError(f"path delay {p.delay} outside [0, {self.N})")

    @property
    def max_delay(self) -> int:
        return max(p.delay for p in self.paths)


def cpp_phase(n: int, delay: int, c1: float) -> np.ndarray:
    """Diagonal of the prefix phase matrix for one path delay."""
    idx = np.arange(n)
    gamma = np.ones(n, dtype=complex)
    wrap = idx < delay
    gamma[wrap] = np.exp(-2j * np.pi * c1 * (n * n - 2 * n * (delay - idx[wrap])))
    return gamma


def build_time_channel(ch: LtvChannel, c1: float) -> np.ndarray:
    """Time-domain channel matrix on the prefix-free block."""
    n = ch.N
    idx = np.arange(n)
    eye = np.eye(n, dtype=complex)
    h = np.zeros((n, n), dtype=complex)
    for p in ch.paths:
        diag = p.gain * cpp_phase(n, p.delay, c1) * np.exp(-2j * np.pi * p.doppler * idx / n)
        h += diag[:, None] * np.roll(eye, p.delay, axis=0)
    return h


def build_heff(ch: LtvChannel, c1: float, profile: PreChirpProfile) -> np.ndarray:
    """DAFT-domain effective channel ``A H A^H``."""
    if profile.N != ch.N:
        raise ValueError("profile and channel sizes differ")
    a = build_daft_matrix(c1, profile.c2_values)
    return a @ build_time_channel(ch, c1) @ a.conj().T


def awgn(s: np.ndarray, n0: float, rng: np.random.Generator) -> np.ndarray:
    """Add circular complex Gaussian noise with per-sample variance ``n0``."""
    if n0 < 0:
        raise ValueError("noise variance must be non-negative")
    s = np.asarray(s, dtype=complex)
    if n0 == 0:
        return s.copy()
    w = rng.standard_normal(s.shape + (2,)) @ np.array([1.0, 1.0j])
    return s + np.sqrt(n0 / 2.0) * w


@dataclass(frozen=True)
class ChannelScenario:
    """Random channel recipe: delays drawn without replacement from [0, l_max]."""

    P: int = 3
    l_max: int = 2
    alpha_max: int = 1
    integer_doppler: bool = True
    seed: int | None = None

    def __post_init__(self):
        if self.P < 1:
            raise ValueError("P must be >= 1")
        if self.P > self.l_max + 1:
            raise ValueError("P distinct delays need l_max >= P - 1")

    def draw(self, n: int, rng: np.random.Generator) -> LtvChannel:
        delays = rng.choice(self.l_max + 1, size=self.P, replace=False)
        if self.integer_doppler:
            dopplers = rng.integers(-self.alpha_max, self.alpha_max + 1, size=self.P)
        else:
            dopplers = rng.uniform(-self.alpha_max, self.alpha_max, size=self.P)
        # CN(0, 1/P) per path, so total power has unit mean
        gains = (rng.standard_normal(self.P) + 1j * rng.standard_normal(self.P)) / np.sqrt(2 * self.P)
        paths = [PathSpec(complex(g), int(l), float(f)) for g, l, f in zip(gains, delays, dopplers)]
        return LtvChannel(tuple(paths), n)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelScenario":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise KeyError(f"unknown channel scenario keys: {sorted(unknown)}")
        return cls(**d)

    @property
    def tag(self) -> str:
        kind = "int" if self.integer_doppler else "frac"
        return f"P{self.P}_l{self.l_max}_a{self.alpha_max}_{kind}"
