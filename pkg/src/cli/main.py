"""Command-line entry point: ``pitchbench <command> [options]``.

Exit codes: 0 success, 1 invalid configuration or input data, 2 runtime failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from src.cli.commands import COMMANDS, run_command
from src.cli.settings import RunConfig, Settings, resolve_config
from src.common.errors import CorpusError, ModelConfigError, PitchBenchError
from src.common.paths import RunLayout

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pitchbench",
        description="Cross-individual generalization benchmark for pitching-motion regression",
    )
    parser.add_argument(
        "command",
        choices=sorted(COMMANDS),
        help="Pipeline step to run",
    )
    parser.add_argument(
        "--config",
        type=Path,
        help="Flat key=value config file (keys are RunConfig fields)",
    )
    parser.add_argument(
        "--corpus",
        type=Path,
        help="Corpus manifest (raw for prep; otherwise normalized or raw)",
    )
    parser.add_argument("--seed", type=int, help="Base seed")
    parser.add_argument("--workers", type=int, help="Worker processes for folds and cells")
    parser.add_argument("--repeats", type=int, help="Ablation repeats per region x window")
    parser.add_argument(
        "--grid",
        help="'full' or ';'-separated specs, e.g. 'transformer:4,64,128;gnn_gru:2,64'",
    )
    parser.add_argument("--baseline", help="Spec for analyze1/analyze2 instead of the selected one")
    parser.add_argument("--out", type=Path, help="Run directory")
    parser.add_argument("--pitchers", type=int, help="Synthetic corpus size")
    parser.add_argument(
        "--raw",
        action="store_true",
        default=None,
        help="synth: write raw captures for prep instead of a normalized corpus",
    )
    parser.add_argument(
        "--log-level",
        help="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level), format=LOG_FORMAT, force=True)


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        settings = Settings(**({"log_level": args.log_level} if args.log_level else {}))
    except ValidationError as e:
        print(f"Invalid settings: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    configure_logging(settings.log_level)

    overrides = {
        "corpus": args.corpus,
        "seed": args.seed,
        "workers": args.workers,
        "repeats": args.repeats,
        "grid": args.grid,
        "baseline": args.baseline,
        "out": args.out,
        "pitchers": args.pitchers,
        "raw": args.raw,
    }
    try:
        config: RunConfig = resolve_config(args.config, overrides)
    except (ValidationError, FileNotFoundError) as e:
        logger.error("Invalid configuration: %s", e)
        return EXIT_VALIDATION

    layout = RunLayout(config.run_dir(settings))
    try:
        run_command(args.command, config, layout)
    except (ValidationError, ModelConfigError, CorpusError) as e:
        logger.error("%s failed: %s", args.command, e)
        return EXIT_VALIDATION
    except PitchBenchError as e:
        logger.error("%s failed: %s (%s)", args.command, e, e.context)
        return EXIT_RUNTIME
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
