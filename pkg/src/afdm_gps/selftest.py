"""Oracle-equivalence checks runnable from the command line."""

from __future__ import annotations

import numpy as np

from afdm_gps import oracles
from afdm_gps.baselines import OtfsGrid, otfs_modulate
from afdm_gps.gps import enumerate_optimal, gps_select, profile_from_selection
from afdm_gps.modem import AfdmConfig, afdm_modulate, build_daft_matrix
from afdm_gps.numerics import dft_unitary, random_qam16
from afdm_gps.papr import oversampled_time_signal


def _checks(seed: int):
    rng = np.random.default_rng(seed)
    cfg = AfdmConfig(16, alpha_max=1)
    _, x = random_qam16(rng, 16)
    prof = profile_from_selection(16, 4, 2, 2, "adjacent", (1, 2, 2, 1))

    s = afdm_modulate(x, cfg.c1, prof).samples
    yield "modulator vs direct sum", np.max(np.abs(s - oracles.direct_modulate(x, cfg.c1, prof.c2_values))), 1e-9

    a = build_daft_matrix(cfg.c1, prof.c2_values)
    yield "DAFT matrix unitarity", np.max(np.abs(a @ a.conj().T - np.eye(16))), 1e-10

    v = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    yield "DFT vs direct matrix (N=12)", np.max(np.abs(dft_unitary(v) - oracles.direct_dft_matrix(12) @ v)), 1e-10

    times = np.arange(64) / 4
    over = oversampled_time_signal(x, cfg.c1, prof, 4)
    yield "oversampling vs fractional sum", np.max(np.abs(over - oracles.direct_modulate(x, cfg.c1, prof.c2_values, times))), 1e-9

    res = gps_select(x, cfg, V=2, W=2, L_select=1)
    sel, p_ref, _ = oracles.gps_matrix_reference(x, cfg.c1, 2, 2, L=1)
    yield "GPS vs matrix-form reference", abs(res.papr_min.papr_linear - p_ref) + (sel != res.profile.selection), 1e-9

    res = enumerate_optimal(x, cfg, V=4, W=2, L_select=1)
    sel, p_ref = oracles.brute_force_reference(x, cfg.c1, 4, 2, L=1)
    yield "enumeration vs brute force", abs(res.papr_min.papr_linear - p_ref) + (sel != res.profile.selection), 1e-9

    grid = OtfsGrid(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    yield "OTFS vs direct ISFFT", np.max(np.abs(otfs_modulate(grid).samples - oracles.direct_otfs(grid.symbols))), 1e-9


def run_selftest(seed: int = 0, echo=print) -> bool:
    ok = True
    for name, err, tol in _checks(seed):
        passed = bool(err <= tol)
        ok &= passed
        echo(f"{'PASS' if passed else 'FAIL'}  {name:34s} err={float(err):.2e} tol={tol:.0e}")
    return ok
