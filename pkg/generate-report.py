#!/usr/bin/env python3
"""Pitching benchmark report generator.

Consolidates the artifacts of a run directory into report.json and the
figure SVGs. Equivalent to ``pitchbench report --out <run dir>``.
"""

import argparse
import sys
from pathlib import Path

from src.cli.main import main as pitchbench_main


def main() -> None:
    """Main entry point for the report generator."""
    parser = argparse.ArgumentParser(description="Generate the benchmark report for a run")
    parser.add_argument(
        "--results-dir",
        type=Path,
        required=True,
        help="Run directory produced by the pitchbench commands",
    )
    parser.add_argument(
        "--log-level",
        default=None,
        help="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )
    args = parser.parse_args()

    argv = ["report", "--out", str(args.results_dir)]
    if args.log_level:
        argv += ["--log-level", args.log_level]
    sys.exit(pitchbench_main(argv))


if __name__ == "__main__":
    main()
