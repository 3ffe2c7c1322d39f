#!/usr/bin/env python3
"""Balance-parameter curves at N_train=150 with slowly decaying eigenvalues,
one curve set per alignment case, plus PCA/OLS reference levels.

Usage: python scripts/run_gamma_curves.py [--trials 10] [--seed 0]
                                          [--out results/gamma]
"""

import argparse
import sys

from sdr.cli import main

parser = argparse.ArgumentParser()
parser.add_argument("--trials", type=int, default=10)
parser.add_argument("--seed", type=int, default=0)
parser.add_argument("--out", default="results/gamma")
args = parser.parse_args()

sys.exit(main(["sweep-gamma",
               "--spectrum", "slow",
               "--ntrain", "150",
               "--trials", str(args.trials),
               "--seed", str(args.seed),
               "--out", args.out]))
