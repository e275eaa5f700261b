#!/usr/bin/env python3
"""Run the three experiment presets and drop CSVs, charts and manifests.

Full runs use 5000 trials per sweep point and take a while; pass --quick
for a 300-trial smoke version with the same sweep structure.
"""

import argparse
import sys

from gsdsce.cli import main as gsdsce_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--trials", type=int, default=5000)
    parser.add_argument("--quick", action="store_true", help="300 trials per point")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args()

    trials = 300 if args.quick else args.trials
    for preset in ("fig1", "fig2", "fig3"):
        argv = [
            "experiment",
            "--preset", preset,
            "--trials", str(trials),
            "--out-dir", args.out_dir,
            "--workers", str(args.workers),
            "--plot",
        ]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
        rc = gsdsce_main(argv)
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
