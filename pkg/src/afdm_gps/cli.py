"""Command-line entry point ``afdm``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from afdm_gps.gps import EnumerationBudgetError
from afdm_gps.harness import ConfigError, ExperimentConfig, run_ber, run_ccdf, write_records
from afdm_gps.plot import PlotInputError, emit_plot
from afdm_gps.receiver import SingularChannelError
from afdm_gps.selftest import run_selftest

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _load(args, experiment: str) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig(experiment=experiment)
    changes = {"experiment": experiment}
    if experiment == "ber" and not args.config:
        changes["schemes"] = ["conventional", "gps"]
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out is not None:
        changes["output"] = args.out
    if args.workers is not None:
        changes["workers"] = args.workers
    return cfg.replace(**changes)


def _experiment(args) -> int:
    cfg = _load(args, args.command)
    if cfg.experiment == "ber":
        rows = run_ber(cfg).records()
    else:
        run = run_ccdf(cfg)
        rows = run.records() if cfg.experiment == "ccdf" else run.sweep_records()
    path = write_records(rows, cfg.output, cfg.experiment, args.format)
    print(f"wrote {len(rows)} rows to {path} (config {cfg.config_hash}, seed {cfg.seed})")
    return 0


def _selftest(args) -> int:
    return 0 if run_selftest(args.seed or 0) else EXIT_NUMERIC


def _plot(args) -> int:
    out = emit_plot(args.input, args.kind, args.out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afdm", description="AFDM PAPR/BER simulator with grouped pre-chirp selection")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("ccdf", "PAPR CCDF curves per scheme cell"),
        ("ber", "BER versus SNR with MMSE detection"),
        ("sweep", "one summary row per scheme cell"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="flat JSON experiment config")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--workers", type=int)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.set_defaults(func=_experiment)
    p = sub.add_parser("selftest", help="fast-path versus oracle equivalence checks")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_selftest)
    p = sub.add_parser("plot", help="render a result CSV to SVG")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--kind", choices=("ccdf", "ber"), required=True)
    p.add_argument("--out")
    p.set_defaults(func=_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, EnumerationBudgetError, PlotInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularChannelError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
