"""Seeded Monte Carlo driver for the CCDF, sweep and BER experiments.

Block ``b`` always draws from ``SeedSequence(seed, spawn_key=(b,))`` and
blocks are processed in fixed-size chunks, so results do not depend on
how many worker processes run the chunks.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from afdm_gps.baselines import OtfsGrid, ofdm_oversampled, otfs_oversampled
from afdm_gps.channel import ChannelScenario, build_heff, build_time_channel
from afdm_gps.gps import (
    DEFAULT_ENUM_BUDGET,
    PATTERNS,
    EnumerationBudgetError,
    enumerate_optimal_batch,
    gps_select_batch,
    make_groups,
    omega_table,
    profile_from_selection,
    side_bit_count,
    side_bits_decode,
    side_bits_encode,
)
from afdm_gps.modem import AfdmConfig, PreChirpProfile, compute_c1, daft, default_c2, idaft
from afdm_gps.numerics import BITS_PER_SYMBOL, qam16_demap, random_qam16
from afdm_gps.papr import ccdf, oversampled_time_signal, papr_at_ccdf, papr_of_signal, to_db
from afdm_gps.receiver import mmse_equalize, send_side_bits

EXPERIMENTS = ("ccdf", "ber", "sweep", "selftest")
CCDF_SCHEMES = ("conventional", "gps", "enumerated", "ofdm", "otfs")
BER_SCHEMES = ("conventional", "gps")
SIDE_INFO_MODES = ("genie", "embedded", "both")
# keys that never change results and stay out of the config hash
_UNHASHED = ("output", "workers")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str = "ccdf"
    N: int = 64
    modulation_order: int = 16
    V: list = field(default_factory=lambda: [4])
    W: list = field(default_factory=lambda: [2])
    k: int | None = 2
    pattern: list = field(default_factory=lambda: ["adjacent"])
    schemes: list = field(default_factory=lambda: ["conventional", "gps"])
    n_blocks: int = 10_000
    snr_db: list = field(default_factory=lambda: [10.0, 15.0, 20.0, 25.0, 30.0])
    seed: int = 0
    L: int = 4
    L_select: int = 4
    side_info_mode: str = "genie"
    output: str = "results"
    enum_budget: int = DEFAULT_ENUM_BUDGET
    thresholds_db: list = field(default_factory=lambda: [0.0, 14.0, 0.1])
    otfs_shape: list = field(default_factory=lambda: [8, 8])
    P: int = 3
    l_max: int = 2
    alpha_max: int = 1
    integer_doppler: bool = True
    min_errors: int | None = None
    chunk_size: int = 1000
    workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        def need(cond, key, msg):
            if not cond:
                raise ConfigError(f"{key}: {msg}")

        need(self.experiment in EXPERIMENTS, "experiment", f"must be one of {EXPERIMENTS}")
        need(isinstance(self.N, int) and self.N >= 2, "N", "must be an integer >= 2")
        need(self.modulation_order == 16, "modulation_order", "only 16-QAM is supported")
        for key in ("V", "W", "pattern", "schemes", "snr_db"):
            need(isinstance(getattr(self, key), list), key, "must be a list")
        for v in self.V:
            need(isinstance(v, int) and v >= 1 and self.N % v == 0, "V", f"{v} does not divide N={self.N}")
        for w in self.W:
            need(isinstance(w, int) and w >= 1, "W", f"{w} is not a positive integer")
        for p in self.pattern:
            need(p in PATTERNS, "pattern", f"{p!r} not in {PATTERNS}")
        known = CCDF_SCHEMES if self.experiment != "ber" else BER_SCHEMES
        for s in self.schemes:
            need(s in known, "schemes", f"{s!r} not in {known}")
        need(self.k is None or (isinstance(self.k, int) and self.k >= 0), "k", "must be null or >= 0")
        need(isinstance(self.n_blocks, int) and self.n_blocks >= 1, "n_blocks", "must be >= 1")
        need(isinstance(self.seed, int) and 0 <= self.seed < 2**64, "seed", "must be a 64-bit unsigned integer")
        need(self.L >= 1, "L", "must be >= 1")
        need(self.L_select >= 1, "L_select", "must be >= 1")
        need(self.side_info_mode in SIDE_INFO_MODES, "side_info_mode", f"must be one of {SIDE_INFO_MODES}")
        need(len(self.thresholds_db) == 3 and self.thresholds_db[2] > 0, "thresholds_db", "expects [start, stop, step]")
        need(
            len(self.otfs_shape) == 2 and self.otfs_shape[0] * self.otfs_shape[1] == self.N,
            "otfs_shape",
            "grid must hold exactly N symbols",
        )
        need(self.chunk_size >= 1, "chunk_size", "must be >= 1")
        need(self.workers >= 1, "workers", "must be >= 1")
        need(self.alpha_max >= 0, "alpha_max", "must be >= 0")
        need(1 <= self.P <= self.l_max + 1, "P", "needs 1 <= P <= l_max + 1")
        need(self.l_max < self.N, "l_max", "must be < N")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        for key in d:
            if key not in names:
                raise ConfigError(f"{key}: unknown config key")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            d = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError("config: top level must be a JSON object")
        return cls.from_dict(d)

    def replace(self, **changes) -> "ExperimentConfig":
        d = asdict(self)
        d.update(changes)
        return ExperimentConfig.from_dict(d)

    @property
    def c1(self) -> float:
        return compute_c1(self.alpha_max, self.N)

    @property
    def config_hash(self) -> str:
        d = {k: v for k, v in asdict(self).items() if k not in _UNHASHED}
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    @property
    def afdm(self) -> AfdmConfig:
        return AfdmConfig(self.N, alpha_max=self.alpha_max, cpp_len=self.l_max, oversample=self.L)

    @property
    def channel(self) -> ChannelScenario:
        return ChannelScenario(self.P, self.l_max, self.alpha_max, self.integer_doppler, self.seed)

    def thresholds(self) -> np.ndarray:
        start, stop, step = self.thresholds_db
        count = int(round((stop - start) / step)) + 1
        return np.round(start + step * np.arange(count), 10)


def block_rng(seed: int, b: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(b,)))


def _chunks(n_blocks: int, size: int):
    return [(s, min(s + size, n_blocks)) for s in range(0, n_blocks, size)]


def _run_chunks(fn, cfg: ExperimentConfig, n_blocks: int, stop=None):
    """Apply ``fn(cfg, start, stop)`` to every chunk; results in chunk order."""
    spans = _chunks(n_blocks, cfg.chunk_size)
    out = []
    if cfg.workers == 1:
        for s, e in spans:
            out.append(fn(cfg, s, e))
            if stop is not None and stop(out):
                break
        return out
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(fn, cfg, s, e) for s, e in spans]
        for fut in futures:
            out.append(fut.result())
            if stop is not None and stop(out):
                for f in futures:
                    f.cancel()
                break
    return out


# ---------------------------------------------------------------- CCDF / sweep


@dataclass(frozen=True)
class Cell:
    scheme: str
    V: int = 1
    W: int = 1
    pattern: str = ""

    @property
    def label(self) -> str:
        if self.scheme in ("gps", "enumerated"):
            return f"{self.scheme} V={self.V} W={self.W} {self.pattern}"
        return self.scheme


def ccdf_cells(cfg: ExperimentConfig) -> list[Cell]:
    cells = []
    for scheme in cfg.schemes:
        if scheme in ("gps", "enumerated"):
            for v in cfg.V:
                for w in cfg.W:
                    for p in cfg.pattern:
                        cells.append(Cell(scheme, v, w, p))
        else:
            cells.append(Cell(scheme))
    for c in cells:
        if c.scheme == "enumerated" and c.W**c.V > cfg.enum_budget:
            raise EnumerationBudgetError(
                f"enumerated V={c.V} W={c.W} needs {c.W**c.V} evaluations per block, "
                f"budget is {cfg.enum_budget}; use gps instead"
            )
    return cells


def draw_blocks(cfg: ExperimentConfig, start: int, stop: int) -> np.ndarray:
    xs = np.empty((stop - start, cfg.N), dtype=complex)
    for i, b in enumerate(range(start, stop)):
        _, xs[i] = random_qam16(block_rng(cfg.seed, b), cfg.N)
    return xs


def _measure(xs, c1, c2, L):
    return papr_of_signal(oversampled_time_signal(xs, c1, c2, L))


def _cell_papr(cfg: ExperimentConfig, cell: Cell, xs: np.ndarray):
    """Linear PAPR per block and the number of PAPR evaluations per block."""
    c1, n = cfg.c1, cfg.N
    if cell.scheme == "conventional":
        return _measure(xs, c1, np.full(n, default_c2(n)), cfg.L), 1
    if cell.scheme == "ofdm":
        return papr_of_signal(ofdm_oversampled(xs, cfg.L)), 1
    if cell.scheme == "otfs":
        grid = OtfsGrid.from_vector(xs, *cfg.otfs_shape)
        return papr_of_signal(otfs_oversampled(grid, cfg.L)), 1
    select = gps_select_batch if cell.scheme == "gps" else enumerate_optimal_batch
    kwargs = {"budget": cfg.enum_budget} if cell.scheme == "enumerated" else {}
    res = select(xs, c1, cell.V, cell.W, cell.pattern, cfg.L_select, cfg.k, **kwargs)
    if cfg.L_select == cfg.L:
        return res.papr_min, res.n_evaluations
    table = omega_table(n, cell.W, cfg.k)
    groups = make_groups(n, cell.V, cell.pattern) - 1
    c2 = table[np.arange(n), (res.selection - 1)[:, groups]]
    return _measure(xs, c1, c2, cfg.L), res.n_evaluations


def _ccdf_chunk(cfg: ExperimentConfig, start: int, stop: int):
    xs = draw_blocks(cfg, start, stop)
    return [_cell_papr(cfg, cell, xs) for cell in ccdf_cells(cfg)]


@dataclass
class CcdfRun:
    config: ExperimentConfig
    cells: list[Cell]
    papr: dict  # Cell -> linear PAPR per block, block order
    evaluations: dict  # Cell -> PAPR evaluations per block

    def papr_db(self, cell: Cell) -> np.ndarray:
        return to_db(self.papr[cell])

    def curve(self, cell: Cell):
        return ccdf(self.papr_db(cell), self.config.thresholds())

    def threshold(self, cell: Cell, prob: float) -> float:
        return papr_at_ccdf(self.papr_db(cell), prob)

    def records(self) -> list[dict]:
        cfg = self.config
        rows = []
        for cell in self.cells:
            cur = self.curve(cell)
            for t, p in zip(cur.thresholds_db, cur.probabilities):
                rows.append(
                    {
                        "threshold_db": _fmt(t),
                        "ccdf": _fmt(p),
                        "n_trials": cur.n_trials,
                        "scheme": cell.scheme,
                        "V": cell.V,
                        "W": cell.W,
                        "pattern": cell.pattern,
                        "seed": cfg.seed,
                        "config_hash": cfg.config_hash,
                    }
                )
        return rows

    def sweep_records(self, probs=(1e-2, 1e-3)) -> list[dict]:
        cfg = self.config
        rows = []
        for cell in self.cells:
            row = {"scheme": cell.scheme, "V": cell.V, "W": cell.W, "pattern": cell.pattern}
            for p in probs:
                row[f"papr_db_at_{p:g}"] = _fmt(self.threshold(cell, p))
            bits = side_bit_count(cell.V, cell.W) if cell.scheme in ("gps", "enumerated") else 0
            row.update(
                {
                    "n_evaluations": self.evaluations[cell],
                    "side_bits": bits,
                    "spectral_efficiency": _fmt(cfg.N * BITS_PER_SYMBOL / (cfg.N * BITS_PER_SYMBOL + bits)),
                    "n_trials": cfg.n_blocks,
                    "seed": cfg.seed,
                    "config_hash": cfg.config_hash,
                }
            )
            rows.append(row)
        return rows


def run_ccdf(cfg: ExperimentConfig) -> CcdfRun:
    cells = ccdf_cells(cfg)
    parts = _run_chunks(_ccdf_chunk, cfg, cfg.n_blocks)
    papr = {c: np.concatenate([part[i][0] for part in parts]) for i, c in enumerate(cells)}
    evals = {c: parts[0][i][1] for i, c in enumerate(cells)}
    return CcdfRun(cfg, cells, papr, evals)


# ---------------------------------------------------------------- BER


def spectral_efficiency(n: int, bits_per_symbol: int, V: int, W: int) -> float:
    """Payload share of the bits sent per block once side bits are added."""
    if min(n, bits_per_symbol, V, W) < 1:
        raise ValueError("arguments must be positive")
    payload = n * bits_per_symbol
    return payload / (payload + side_bit_count(V, W))


@dataclass(frozen=True)
class BerCell:
    scheme: str
    side_info_mode: str = "none"
    V: int = 1
    W: int = 1
    pattern: str = ""


def ber_cells(cfg: ExperimentConfig) -> list[BerCell]:
    modes = ("genie", "embedded") if cfg.side_info_mode == "both" else (cfg.side_info_mode,)
    cells = []
    for scheme in cfg.schemes:
        if scheme == "conventional":
            cells.append(BerCell("conventional"))
            continue
        for v in cfg.V:
            for w in cfg.W:
                for p in cfg.pattern:
                    for mode in modes:
                        cells.append(BerCell("gps", mode, v, w, p))
    return cells


def _ber_chunk(cfg: ExperimentConfig, start: int, stop: int):
    """Error counts per block, shape (blocks, cells, snr points)."""
    n, c1 = cfg.N, cfg.c1
    cells = ber_cells(cfg)
    snr = 10.0 ** (np.asarray(cfg.snr_db, dtype=float) / 10.0)
    errors = np.zeros((stop - start, len(cells), snr.size), dtype=np.int64)
    conv = PreChirpProfile.uniform(n, default_c2(n))
    scenario = cfg.channel
    for b in range(start, stop):
        rng = block_rng(cfg.seed, b)
        bits, x = random_qam16(rng, n)
        ch = scenario.draw(n, rng)
        # unit-variance noise reused at every SNR point (common random numbers)
        w_data = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
        w_head = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
        h = build_time_channel(ch, c1)
        cache = {}

        def link(profile):
            key = (profile.V, profile.W, profile.pattern, profile.selection)
            if key not in cache:
                cache[key] = (h @ idaft(x, c1, profile.c2_values), build_heff(ch, c1, profile))
            return cache[key]

        for ci, cell in enumerate(cells):
            if cell.scheme == "conventional":
                prof, n_side = conv, 0
            else:
                res = gps_select_batch(x[None], c1, cell.V, cell.W, cell.pattern, cfg.L_select, cfg.k)
                sel = tuple(int(v) for v in res.selection[0])
                prof = profile_from_selection(n, cell.V, cell.W, cfg.k, cell.pattern, sel)
                n_side = side_bit_count(cell.V, cell.W) if cell.side_info_mode == "embedded" else 0
            hs, h_eff = link(prof)
            for si, gamma in enumerate(snr):
                # header symbols draw on the same energy budget as the payload
                n0 = (n + n_side) / n / gamma
                rx_prof = prof
                if n_side:
                    rx_sel = _receive_side_info(sel, cell, ch, cfg, n0, w_head)
                    if rx_sel != sel:
                        rx_prof = profile_from_selection(n, cell.V, cell.W, cfg.k, cell.pattern, rx_sel)
                r = hs + np.sqrt(n0) * w_data
                y = daft(r, c1, rx_prof.c2_values)
                h_rx = h_eff if rx_prof is prof else build_heff(ch, c1, rx_prof)
                rx_bits = qam16_demap(mmse_equalize(y, h_rx, n0))
                errors[b - start, ci, si] = np.count_nonzero(rx_bits != bits)
    return errors


def _receive_side_info(sel, cell: BerCell, ch, cfg: ExperimentConfig, n0: float, unit_noise) -> tuple:
    rx = send_side_bits(side_bits_encode(sel, cell.W), ch, cfg.afdm, n0, unit_noise=unit_noise)
    try:
        return side_bits_decode(rx, cell.V, cell.W)
    except ValueError:
        # invalid code word: fall back to the initial selection
        return (1,) * cell.V


@dataclass
class BerRun:
    config: ExperimentConfig
    cells: list[BerCell]
    block_errors: np.ndarray  # (blocks, cells, snr)

    @property
    def n_blocks(self) -> int:
        return self.block_errors.shape[0]

    @property
    def errors(self) -> np.ndarray:
        return self.block_errors.sum(axis=0)

    @property
    def n_bits(self) -> int:
        return self.n_blocks * self.config.N * BITS_PER_SYMBOL

    def ber(self, cell: BerCell) -> np.ndarray:
        return self.errors[self.cells.index(cell)] / self.n_bits

    def paired_difference(self, a: BerCell, b: BerCell) -> tuple[np.ndarray, np.ndarray]:
        """BER difference ``a - b`` per SNR point and its block-level standard error.

        Errors cluster within blocks (one bad channel corrupts many bits), so
        the standard error comes from the spread of per-block differences.
        """
        bits_per_block = self.config.N * BITS_PER_SYMBOL
        d = (self.block_errors[:, self.cells.index(a)] - self.block_errors[:, self.cells.index(b)]) / bits_per_block
        se = d.std(axis=0, ddof=1) / np.sqrt(d.shape[0]) if d.shape[0] > 1 else np.full(d.shape[1], np.inf)
        return d.mean(axis=0), se

    def records(self) -> list[dict]:
        cfg = self.config
        rows = []
        for ci, cell in enumerate(self.cells):
            for si, s in enumerate(cfg.snr_db):
                rows.append(
                    {
                        "snr_db": _fmt(s),
                        "ber": _fmt(self.errors[ci, si] / self.n_bits),
                        "n_bits": self.n_bits,
                        "scheme": cell.scheme,
                        "side_info_mode": cell.side_info_mode,
                        "V": cell.V,
                        "W": cell.W,
                        "seed": cfg.seed,
                        "pattern": cell.pattern,
                        "n_errors": int(self.errors[ci, si]),
                        "channel": cfg.channel.tag,
                        "config_hash": cfg.config_hash,
                    }
                )
        return rows


def run_ber(cfg: ExperimentConfig) -> BerRun:
    cells = ber_cells(cfg)

    def enough(parts):
        if cfg.min_errors is None:
            return False
        total = sum(p.sum(axis=0) for p in parts)
        return bool(np.all(total >= cfg.min_errors))

    parts = _run_chunks(_ber_chunk, cfg, cfg.n_blocks, stop=enough)
    return BerRun(cfg, cells, np.concatenate(parts, axis=0))


def snr_at_ber(snr_db, ber, target: float) -> float:
    """SNR where the BER curve crosses ``target`` (log-linear interpolation)."""
    snr_db = np.asarray(snr_db, dtype=float)
    ber = np.asarray(ber, dtype=float)
    for i in range(len(snr_db) - 1):
        b0, b1 = ber[i], ber[i + 1]
        if b0 >= target >= b1 and b1 > 0:
            if b0 == b1:
                return float(snr_db[i])
            frac = (math.log10(b0) - math.log10(target)) / (math.log10(b0) - math.log10(b1))
            return float(snr_db[i] + frac * (snr_db[i + 1] - snr_db[i]))
    raise ValueError(f"BER curve does not cross {target:g} inside the SNR grid")


# ---------------------------------------------------------------- output


def _fmt(v) -> str:
    return format(float(v), ".10g")


def records_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def records_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=1) + "\n"


def write_records(rows: list[dict], out_dir, stem: str, fmt: str = "csv") -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{stem}.{fmt}"
    text = records_to_csv(rows) if fmt == "csv" else records_to_json(rows)
    path.write_text(text)
    return path
