"""BER curves with genie and embedded side information, plus the SNR gaps.

    python scripts/ber_penalty.py configs/ber_side_info.json [--target 1e-3]
"""

import argparse

import numpy as np

from afdm_gps.harness import BerCell, ExperimentConfig, run_ber, snr_at_ber


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("config")
    ap.add_argument("--blocks", type=int)
    ap.add_argument("--target", type=float, default=1e-3)
    args = ap.parse_args()
    cfg = ExperimentConfig.from_json(args.config)
    if args.blocks:
        cfg = cfg.replace(n_blocks=args.blocks)
    run = run_ber(cfg)
    print(f"{run.n_bits} bits per point, channel {cfg.channel.tag}")
    print("snr_db".ljust(28) + "".join(f"{s:>11g}" for s in cfg.snr_db))
    crossing = {}
    for cell in run.cells:
        ber = run.ber(cell)
        name = cell.scheme if cell.scheme == "conventional" else f"gps V={cell.V} W={cell.W} {cell.side_info_mode}"
        print(name.ljust(28) + "".join(f"{b:11.3e}" for b in ber))
        try:
            crossing[cell] = snr_at_ber(cfg.snr_db, ber, args.target)
        except ValueError:
            crossing[cell] = np.nan
    conv = BerCell("conventional")
    for cell in run.cells:
        if cell.scheme == "gps":
            diff, se = run.paired_difference(cell, conv)
            print(f"{cell.side_info_mode}: max |gps-conv|/SE = {np.max(np.abs(diff) / np.where(se > 0, se, np.inf)):.2f}")
    print(f"SNR at BER {args.target:g}: " + ", ".join(f"{c.side_info_mode}/{c.scheme} {s:.3f} dB" for c, s in crossing.items()))


if __name__ == "__main__":
    main()
