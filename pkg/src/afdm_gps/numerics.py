"""Unitary DFT pair and Gray-mapped 16-QAM.

Every vector routine works along the last axis so the same call serves a
single block or a stacked batch of blocks.
"""

from __future__ import annotations

import numpy as np

# Per-axis Gray code on {-3, -1, +1, +3}: bit pair (MSB, LSB) -> level.
_GRAY_LEVELS = {(0, 0): -3, (0, 1): -1, (1, 1): 1, (1, 0): 3}
QAM16_SCALE = 1.0 / np.sqrt(10.0)


def _build_qam16() -> np.ndarray:
    points = np.empty(16, dtype=complex)
    for label in range(16):
        b = [(label >> (3 - i)) & 1 for i in range(4)]
        i_level = _GRAY_LEVELS[(b[0], b[1])]
        q_level = _GRAY_LEVELS[(b[2], b[3])]
        points[label] = QAM16_SCALE * complex(i_level, q_level)
    return points


# Indexed by label value 0..15; bit 0 of the label group is the MSB.
QAM16_POINTS = _build_qam16()
QAM16_POINTS.setflags(write=False)
BITS_PER_SYMBOL = 4


def _check_nonempty(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise ValueError("transform input must be a non-empty vector")
    return x


def _is_pow2(n: int) -> bool:
    return n & (n - 1) == 0


def dft_matrix(n: int) -> np.ndarray:
    """Unitary N-point DFT matrix F with F[k, m] = exp(-2j*pi*k*m/N)/sqrt(N)."""
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def dft_unitary(x: np.ndarray) -> np.ndarray:
    """Return F @ x along the last axis, F the 1/sqrt(N)-scaled DFT."""
    x = _check_nonempty(x)
    n = x.shape[-1]
    if _is_pow2(n):
        return np.fft.fft(x, axis=-1, norm="ortho")
    return x @ dft_matrix(n).T


def idft_unitary(x: np.ndarray) -> np.ndarray:
    """Return F^H @ x along the last axis."""
    x = _check_nonempty(x)
    n = x.shape[-1]
    if _is_pow2(n):
        return np.fft.ifft(x, axis=-1, norm="ortho")
    return x @ dft_matrix(n).conj()


def _as_bits(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if np.any(bits > 1):
        raise ValueError("bits must be 0 or 1")
    return bits


def qam16_map(bits) -> np.ndarray:
    """Map a flat bit sequence to unit-energy 16-QAM symbols, 4 bits per symbol."""
    bits = _as_bits(bits)
    if bits.size % BITS_PER_SYMBOL:
        raise ValueError(f"bit count {bits.size} is not divisible by 4")
    groups = bits.reshape(-1, BITS_PER_SYMBOL)
    labels = groups @ np.array([8, 4, 2, 1])
    return QAM16_POINTS[labels]


def qam16_labels(symbols: np.ndarray) -> np.ndarray:
    """Nearest-point label per symbol; equal distances resolve to the lowest label."""
    symbols = np.asarray(symbols, dtype=complex)
    dist = np.abs(symbols[..., None] - QAM16_POINTS) ** 2
    return np.argmin(dist, axis=-1)


def qam16_demap(symbols: np.ndarray) -> np.ndarray:
    """Hard-decision demap to a flat uint8 bit array (4 bits per symbol)."""
    labels = qam16_labels(np.ravel(symbols))
    shifts = np.array([3, 2, 1, 0])
    return ((labels[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def random_qam16(rng: np.random.Generator, shape) -> tuple[np.ndarray, np.ndarray]:
    """Draw uniform bits and their 16-QAM symbols; symbols have ``shape``."""
    shape = tuple(np.atleast_1d(shape))
    bits = rng.integers(0, 2, size=shape + (BITS_PER_SYMBOL,), dtype=np.uint8)
    labels = bits @ np.array([8, 4, 2, 1], dtype=np.int64)
    return bits.reshape(shape[:-1] + (-1,)), QAM16_POINTS[labels]
