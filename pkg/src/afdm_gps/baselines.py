"""OFDM and OTFS modulators used as PAPR references."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from afdm_gps.modem import TimeBlock
from afdm_gps.numerics import dft_unitary, idft_unitary
from afdm_gps.papr import oversampled_time_signal


def ofdm_modulate(x: np.ndarray) -> TimeBlock:
    return TimeBlock(idft_unitary(x))


def ofdm_oversampled(x: np.ndarray, L: int) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    return oversampled_time_signal(x, 0.0, np.zeros(x.shape[-1]), L)


@dataclass(frozen=True)
class OtfsGrid:
    """Delay-Doppler symbols indexed ``[doppler, delay]``."""

    symbols: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.symbols, dtype=complex)
        if s.ndim < 2 or min(s.shape[-2:]) < 1:
            raise ValueError("OTFS grid needs doppler and delay axes")
        object.__setattr__(self, "symbols", s)

    @property
    def doppler_bins(self) -> int:
        return self.symbols.shape[-2]

    @property
    def delay_bins(self) -> int:
        return self.symbols.shape[-1]

    @classmethod
    def from_vector(cls, x: np.ndarray, doppler_bins: int, delay_bins: int) -> "OtfsGrid":
        x = np.asarray(x, dtype=complex)
        if x.shape[-1] != doppler_bins * delay_bins:
            raise ValueError(f"{x.shape[-1]} symbols do not fill a {doppler_bins}x{delay_bins} grid")
        return cls(x.reshape(x.shape[:-1] + (doppler_bins, delay_bins)))


def _slots(grid: OtfsGrid) -> np.ndarray:
    # ISFFT + rectangular Heisenberg collapses to an IDFT over Doppler;
    # row n of the result is the n-th time slot of ``delay_bins`` samples
    return np.swapaxes(idft_unitary(np.swapaxes(grid.symbols, -1, -2)), -1, -2)


def otfs_modulate(grid: OtfsGrid) -> TimeBlock:
    slots = _slots(grid)
    return TimeBlock(slots.reshape(slots.shape[:-2] + (-1,)))


def otfs_oversampled(grid: OtfsGrid, L: int) -> np.ndarray:
    """Frame sampled ``L`` times per sample; each slot is interpolated as a
    multicarrier symbol over ``delay_bins`` subcarriers."""
    if L < 1:
        raise ValueError("oversampling factor must be >= 1")
    slots = _slots(grid)
    if L > 1:
        m = grid.delay_bins
        spec = np.zeros(slots.shape[:-1] + (L * m,), dtype=complex)
        spec[..., :m] = dft_unitary(slots)
        slots = np.fft.ifft(spec, axis=-1) * (L * m / np.sqrt(m))
    return slots.reshape(slots.shape[:-2] + (-1,))
