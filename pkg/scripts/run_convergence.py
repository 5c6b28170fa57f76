#!/usr/bin/env python3
"""Run the convergence-rate harness on the rotating-path scenario.

Writes convergence.csv (one row per level pair) into the output directory
and exits nonzero if any fitted bound is violated.
"""

import argparse
import os
import sys

from vortexflow.cli import main as vortexflow_main

HERE = os.path.dirname(os.path.abspath(__file__))
DEFAULT_SCENARIO = os.path.join(HERE, "..", "scenarios", "rotating_path.scn")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=DEFAULT_SCENARIO)
    parser.add_argument("--out", default="results/convergence")
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args()

    argv = ["converge", "--scenario", args.scenario, "--out", args.out]
    if args.threads is not None:
        argv += ["--threads", str(args.threads)]
    return vortexflow_main(argv)


if __name__ == "__main__":
    sys.exit(main())
