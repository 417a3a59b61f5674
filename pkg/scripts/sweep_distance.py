#!/usr/bin/env python3
"""Sweep the fiber length and record the link budget.

Usage: python scripts/sweep_distance.py [--stop-km 5] [--num 51] [--out DIR]
"""

import argparse
from pathlib import Path

import numpy as np

from pnsslink.config import default_config
from pnsslink.pipeline import run_sweep, write_sweep_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--stop-km", type=float, default=5.0)
    parser.add_argument("--num", type=int, default=51)
    parser.add_argument("--out", default="out")
    args = parser.parse_args()

    config = default_config()
    values = np.linspace(0.0, args.stop_km, args.num)
    rows = run_sweep(config, "channel.L0_km", values)
    path = write_sweep_csv(rows, config, Path(args.out) / "sweep.csv")
    print(f"wrote {path}")
    for row in rows[:: max(1, len(rows) // 10)]:
        print(
            f"L0 = {row['L0_km']:5.2f} km   one-photon {row['eta1']:.4f}   "
            f"two-photon {row['eta2']:.4f}   weighted {row['weighted_success']:.4f}   "
            f"phase {row['phase_rad']:.3f} rad"
        )


if __name__ == "__main__":
    main()
