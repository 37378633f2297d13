#!/usr/bin/env python3
"""Run the full claims verification suite and print the report.

Usage: python scripts/run_suite.py [--json]
Exit code 0 when no entry fails (discrepancies do not fail the run).
"""
import sys

from wcelab.cli import main

if __name__ == "__main__":
    fmt = "json" if "--json" in sys.argv[1:] else "text"
    sys.exit(main(["suite", "--format", fmt]))
