#!/usr/bin/env python3
"""Recompute the two headline scans (settings scan at d=2, dimension scan at
k=2) and print computed vs published columns.

Equivalent to `cna report tables`; kept as a script so the full run is one
command with adjustable effort.
"""

import argparse
import sys

from cna.cli import main as cna_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--restarts", type=int, default=64)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out-json", default="cna_tables.json")
    parser.add_argument("--out-csv", default="cna_tables.csv")
    args = parser.parse_args()
    return cna_main([
        "report", "tables",
        "--restarts", str(args.restarts),
        "--seed", str(args.seed),
        "--out-json", args.out_json,
        "--out-csv", args.out_csv,
    ])


if __name__ == "__main__":
    sys.exit(main())
