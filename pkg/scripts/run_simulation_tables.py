#!/usr/bin/env python3
"""Full synthetic study: both spectra, all alignment cases, both training
sizes, 100 trials each (the complete protocol; takes a while).

Usage: python scripts/run_simulation_tables.py [--trials 100] [--seed 0]
                                               [--out results/simulation]
"""

import argparse
import sys

from sdr.cli import main

parser = argparse.ArgumentParser()
parser.add_argument("--trials", type=int, default=100)
parser.add_argument("--seed", type=int, default=0)
parser.add_argument("--out", default="results/simulation")
args = parser.parse_args()

sys.exit(main(["simulate",
               "--trials", str(args.trials),
               "--seed", str(args.seed),
               "--out", args.out]))
