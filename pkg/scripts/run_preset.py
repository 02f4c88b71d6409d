"""Run a config preset, write its CSV and render the SVG next to it.

    python scripts/run_preset.py configs/papr_v_sweep.json [--blocks 2000] [--workers 4]
"""

import argparse

from afdm_gps.harness import ExperimentConfig, run_ber, run_ccdf, write_records
from afdm_gps.plot import emit_plot


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("config")
    ap.add_argument("--blocks", type=int, help="override n_blocks for a quick look")
    ap.add_argument("--workers", type=int)
    args = ap.parse_args()
    cfg = ExperimentConfig.from_json(args.config)
    changes = {k: v for k, v in (("n_blocks", args.blocks), ("workers", args.workers)) if v is not None}
    cfg = cfg.replace(**changes)
    if cfg.experiment == "ber":
        rows = run_ber(cfg).records()
    else:
        run = run_ccdf(cfg)
        rows = run.sweep_records() if cfg.experiment == "sweep" else run.records()
    path = write_records(rows, cfg.output, cfg.experiment)
    print(f"{path} ({len(rows)} rows, config {cfg.config_hash})")
    if cfg.experiment in ("ccdf", "ber"):
        print(emit_plot(path, cfg.experiment))


if __name__ == "__main__":
    main()
