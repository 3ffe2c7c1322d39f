#!/usr/bin/env python3
"""K sweeps on the two UCI regression datasets.

Download the raw files first (they are not bundled):
  winequality-white.csv   https://archive.ics.uci.edu/dataset/186
  parkinsons_updrs.data   https://archive.ics.uci.edu/dataset/189

Usage: python scripts/run_real_data.py --wine data/winequality-white.csv \
           --parkinsons data/parkinsons_updrs.data [--out results/real]
"""

import argparse
import sys

from sdr.cli import main

parser = argparse.ArgumentParser()
parser.add_argument("--wine", help="path to winequality-white.csv")
parser.add_argument("--parkinsons", help="path to parkinsons_updrs.data")
parser.add_argument("--seed", type=int, default=0)
parser.add_argument("--out", default="results/real")
args = parser.parse_args()

if not args.wine and not args.parkinsons:
    parser.error("nothing to do: pass --wine and/or --parkinsons")

status = 0
if args.wine:
    status |= main(["real-data",
                    "--data", args.wine,
                    "--response", "quality",
                    "--delimiter", ";",
                    "--seed", str(args.seed),
                    "--out", f"{args.out}/wine"])
if args.parkinsons:
    # keep only the 16 voice features: drop identifiers, demographics, and
    # the alternative target
    status |= main(["real-data",
                    "--data", args.parkinsons,
                    "--response", "total_UPDRS",
                    "--drop", "subject#,age,sex,test_time,motor_UPDRS",
                    "--seed", str(args.seed),
                    "--out", f"{args.out}/parkinsons"])
sys.exit(status)
