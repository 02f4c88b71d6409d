"""PAPR thresholds at fixed CCDF levels for every cell of a CCDF preset.

    python scripts/papr_table.py configs/papr_v_sweep.json configs/papr_v_sweep_n_point.json
"""

import argparse

from afdm_gps.harness import ExperimentConfig, run_ccdf


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("configs", nargs="+")
    ap.add_argument("--blocks", type=int)
    ap.add_argument("--probs", type=float, nargs="+", default=[1e-2, 1e-3])
    args = ap.parse_args()
    for path in args.configs:
        cfg = ExperimentConfig.from_json(path)
        if args.blocks:
            cfg = cfg.replace(n_blocks=args.blocks)
        run = run_ccdf(cfg)
        print(f"# {path}: N={cfg.N} L={cfg.L} L_select={cfg.L_select} blocks={cfg.n_blocks} seed={cfg.seed}")
        print("cell".ljust(32) + "".join(f"@{p:g}".rjust(10) for p in args.probs) + "evals".rjust(8))
        for cell in run.cells:
            vals = "".join(f"{run.threshold(cell, p):10.2f}" for p in args.probs)
            print(cell.label.ljust(32) + vals + f"{run.evaluations[cell]:8d}")


if __name__ == "__main__":
    main()
