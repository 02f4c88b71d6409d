"""DAFT-domain MMSE detection, side-information handling and BER counting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from afdm_gps.channel import LtvChannel, awgn, build_heff, build_time_channel
from afdm_gps.gps import profile_from_selection, side_bits_decode
from afdm_gps.modem import (
    AfdmConfig,
    PreChirpProfile,
    TimeBlock,
    afdm_demodulate,
    afdm_modulate,
    default_c2,
    remove_cpp,
)
from afdm_gps.numerics import qam16_demap


class SingularChannelError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class EqualizerOutput:
    x_hat: np.ndarray
    profile_used: PreChirpProfile


def mmse_equalize(y: np.ndarray, h_eff: np.ndarray, n0: float) -> np.ndarray:
    """Linear MMSE estimate ``H^H (H H^H + n0 I)^-1 y`` for unit-energy symbols."""
    h_eff = np.asarray(h_eff, dtype=complex)
    if h_eff.ndim != 2 or h_eff.shape[0] != h_eff.shape[1]:
        raise ValueError("effective channel must be square")
    if n0 < 0:
        raise ValueError("noise variance must be non-negative")
    n = h_eff.shape[0]
    if n0 == 0 and np.linalg.matrix_rank(h_eff) < n:
        raise SingularChannelError("rank-deficient channel without noise regularization")
    gram = h_eff @ h_eff.conj().T + n0 * np.eye(n)
    try:
        return h_eff.conj().T @ np.linalg.solve(gram, np.asarray(y, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise SingularChannelError(str(exc)) from exc


def equalize_block(r, channel: LtvChannel, config: AfdmConfig, profile: PreChirpProfile, n0: float) -> EqualizerOutput:
    if isinstance(r, TimeBlock):
        r = remove_cpp(r)
    y = afdm_demodulate(r, config.c1, profile)
    h_eff = build_heff(channel, config.c1, profile)
    return EqualizerOutput(mmse_equalize(y, h_eff, n0), profile)


def recover_bits(
    r,
    side_bits,
    channel: LtvChannel,
    config: AfdmConfig,
    *,
    V: int,
    W: int,
    pattern: str = "adjacent",
    k: int | None = 2,
    n0: float = 0.0,
    profile: PreChirpProfile | None = None,
) -> np.ndarray:
    """Decode side bits into a profile, then demodulate, equalize and demap.

    Passing ``profile`` directly is the genie mode and ignores ``side_bits``.
    """
    if profile is None:
        selection = side_bits_decode(side_bits, V, W)
        profile = profile_from_selection(config.N, V, W, k, pattern, selection)
    out = equalize_block(r, channel, config, profile, n0)
    return qam16_demap(out.x_hat)


def header_profile(n: int) -> PreChirpProfile:
    """Fixed profile of the block that carries side information."""
    return PreChirpProfile.uniform(n, default_c2(n))


def send_side_bits(
    side_bits,
    channel: LtvChannel,
    config: AfdmConfig,
    n0: float,
    rng: np.random.Generator | None = None,
    unit_noise: np.ndarray | None = None,
) -> np.ndarray:
    """Carry side bits as BPSK on the lowest DAFT indices of a header block.

    The header uses a fixed conventional profile and the same channel
    realization as the payload; returns the hard-decided bits. Noise comes
    from ``rng``, or from a pre-drawn unit-variance vector scaled by
    ``sqrt(n0)``.
    """
    side_bits = np.asarray(side_bits, dtype=np.uint8)
    n = config.N
    if side_bits.size > n:
        raise ValueError("too many side bits for one header block")
    if side_bits.size == 0:
        return side_bits.copy()
    prof = header_profile(n)
    x = np.zeros(n, dtype=complex)
    x[: side_bits.size] = 1.0 - 2.0 * side_bits
    h = build_time_channel(channel, config.c1)
    clean = h @ afdm_modulate(x, config.c1, prof).samples
    if unit_noise is not None:
        r = clean + np.sqrt(n0) * unit_noise
    else:
        r = awgn(clean, n0, rng)
    out = equalize_block(r, channel, config, prof, n0)
    return (out.x_hat[: side_bits.size].real < 0).astype(np.uint8)


def ber_count(tx_bits, rx_bits) -> tuple[int, int]:
    tx = np.asarray(tx_bits, dtype=np.uint8).ravel()
    rx = np.asarray(rx_bits, dtype=np.uint8).ravel()
    if tx.size != rx.size:
        raise ValueError(f"bit sequences differ in length ({tx.size} vs {rx.size})")
    return int(np.count_nonzero(tx != rx)), int(tx.size)
