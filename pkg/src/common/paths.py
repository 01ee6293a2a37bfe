"""Centralized path configuration for the entire project.

This module provides a single source of truth for repository paths and the
standard file names written into a run directory, so the commands, the report
generator and the tests agree on where every artifact lives.
"""

from pathlib import Path


class ProjectPaths:
    """Project directory structure paths."""

    def __init__(self, base_path: Path | None = None):
        """Initialize project paths.

        Args:
            base_path: Optional base path for the project root.
                      If None, auto-detects from this file's location.
        """
        if base_path is None:
            # Auto-detect: go up from src/common/paths.py to repository root
            self.root = Path(__file__).parent.parent.parent
        else:
            self.root = base_path

        self.src = self.root / "src"
        self.templates = self.src / "cli" / "templates"

        # Default output root (overridable with PITCHBENCH_OUTPUT_ROOT)
        self.results = self.root / "results"


class RunLayout:
    """File names inside one run directory.

    Every command reads and writes through these names; `report` uses
    `expected_files` to list what is missing.
    """

    def __init__(self, run_dir: Path):
        self.run_dir = run_dir

        self.corpus = run_dir / "corpus"
        self.corpus_manifest = self.corpus / "manifest.json"
        self.raw_corpus = run_dir / "raw"
        self.prep_log = run_dir / "prep_log.json"

        self.baseline_csv = run_dir / "baseline.csv"
        self.baseline_folds_csv = run_dir / "baseline_folds.csv"
        self.baseline_json = run_dir / "baseline.json"
        self.baseline_spec = run_dir / "baseline_spec.json"
        self.baseline_evaluation = run_dir / "baseline_evaluation.json"

        self.grouping_csv = run_dir / "grouping.csv"
        self.analysis1_csv = run_dir / "analysis1.csv"
        self.analysis1_json = run_dir / "analysis1.json"

        self.analysis2_csv = run_dir / "analysis2.csv"
        self.analysis2_json = run_dir / "analysis2.json"

        self.pitcher_means_svg = run_dir / "pitcher_means.svg"
        self.group_errors_svg = run_dir / "group_errors.svg"
        self.ablation_svg = run_dir / "ablation.svg"
        self.report_json = run_dir / "report.json"

    def manifest(self, command: str) -> Path:
        """Path of the run manifest written by `command`."""
        return self.run_dir / f"manifest_{command}.json"

    def expected_files(self) -> list[Path]:
        """Artifacts `report` consolidates."""
        return [
            self.baseline_json,
            self.baseline_evaluation,
            self.analysis1_json,
            self.analysis2_json,
        ]


# Global singleton instance
paths = ProjectPaths()


RESULTS_DIR = paths.results
TEMPLATES_DIR = paths.templates
