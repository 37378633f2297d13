#!/usr/bin/env python3
"""Randomized cross-validation of the closed-form layer against the
dense-matrix oracle: classification verdicts and polar reconstruction.

Usage: python scripts/oracle_crosscheck.py [SEEDS] [MAX_N]
"""
import sys

from wcelab.cli import main

if __name__ == "__main__":
    seeds = sys.argv[1] if len(sys.argv) > 1 else "100"
    max_n = sys.argv[2] if len(sys.argv) > 2 else "64"
    sys.exit(main(["oracle-check", "--seeds", seeds, "--max-n", max_n]))
