#!/usr/bin/env python3
"""Measure the near-collision set of the pure-kernel scenario.

Writes collision.csv with the measured P(eps, R) against the pi*eps^2
area oracle on a geometric epsilon grid.
"""

import argparse
import os
import sys

from vortexflow.cli import main as vortexflow_main

HERE = os.path.dirname(os.path.abspath(__file__))
DEFAULT_SCENARIO = os.path.join(HERE, "..", "scenarios", "pure_kernel.scn")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=DEFAULT_SCENARIO)
    parser.add_argument("--level", type=int, default=64,
                        help="regularization level for the trajectory run")
    parser.add_argument("--out", default="results/collision")
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args()

    argv = ["collision", "--scenario", args.scenario,
            "--level", str(args.level), "--out", args.out]
    if args.threads is not None:
        argv += ["--threads", str(args.threads)]
    return vortexflow_main(argv)


if __name__ == "__main__":
    sys.exit(main())
