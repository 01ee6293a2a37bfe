"""Atomic file persistence for run artifacts and run manifests.

Every artifact is written to a temporary sibling first and then renamed over
the destination, so an interrupted command never leaves a truncated file in
place of a complete one.
"""

import json
import logging
import platform
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

import pandas as pd

logger = logging.getLogger(__name__)


def write_json(path: Path, data: Any) -> None:
    """Write JSON atomically with stable key order and formatting."""
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_file = path.with_suffix(path.suffix + ".tmp")
    with open(temp_file, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True, default=str)
        f.write("\n")
    temp_file.replace(path)


def read_json(path: Path) -> Any:
    """Read a JSON artifact."""
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def write_text(path: Path, text: str) -> None:
    """Write a text artifact (SVG, CSV rendered elsewhere) atomically."""
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_file = path.with_suffix(path.suffix + ".tmp")
    temp_file.write_text(text, encoding="utf-8")
    temp_file.replace(path)


def write_csv(path: Path, frame: pd.DataFrame, float_format: str = "%.10g") -> None:
    """Write a results CSV atomically with fixed column order and float format."""
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_file = path.with_suffix(path.suffix + ".tmp")
    frame.to_csv(temp_file, index=False, float_format=float_format, lineterminator="\n")
    temp_file.replace(path)


def package_versions() -> dict[str, str]:
    """Versions of the numeric stack, echoed into run manifests."""
    import numpy
    import pydantic
    import scipy

    return {
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "pydantic": pydantic.VERSION,
    }


class RunManifest:
    """Run manifest of one command invocation.

    Written with status "running" before any result file, then rewritten with
    the final status and wall time.
    """

    def __init__(self, path: Path, command: str, config: dict[str, Any], seed: int):
        self.path = path
        self.data: dict[str, Any] = {
            "command": command,
            "config": config,
            "seed": seed,
            "versions": package_versions(),
            "status": "running",
            "started_at": datetime.now(timezone.utc).isoformat(),
            "wall_time_seconds": None,
            "outputs": [],
            "error": None,
        }
        self._start = time.perf_counter()

    def start(self) -> "RunManifest":
        """Persist the manifest before work begins."""
        write_json(self.path, self.data)
        logger.debug("Run manifest written: %s", self.path)
        return self

    def finish(
        self,
        outputs: list[Path],
        error: Optional[dict[str, Any]] = None,
    ) -> None:
        """Record outputs, final status and wall time."""
        self.data["status"] = "failed" if error else "completed"
        self.data["error"] = error
        self.data["outputs"] = sorted(p.name for p in outputs)
        self.data["wall_time_seconds"] = round(time.perf_counter() - self._start, 3)
        write_json(self.path, self.data)
