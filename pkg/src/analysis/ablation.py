"""Spatiotemporal ablation: LOSOCV on every body region x cumulative window."""

import logging
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator

from src.common.errors import EvaluationError, PitchBenchError
from src.dataset.masking import restrict_corpus
from src.dataset.models import (
    ABLATION_REGIONS,
    N_WINDOWS,
    PitcherRecord,
    Region,
    RegionMask,
    WindowSpec,
)
from src.harness.config import TrainConfig
from src.harness.evaluation import evaluate_losocv
from src.harness.pool import run_parallel
from src.models.specs import ModelSpec, model_spec_adapter

logger = logging.getLogger(__name__)

ABLATION_COLUMNS = ["region", "window", "n_frames", "r2_mean", "r2_sd", "repeats"]


class AblationConfig(BaseModel):
    repeats: int = Field(default=10, ge=1, description="LOSOCV runs per region x window")
    regions: list[Region] = Field(default_factory=lambda: list(ABLATION_REGIONS))
    emergence_threshold: float = Field(
        default=0.25, description="Mean R^2 a window must exceed to count as emerged"
    )
    include_control: bool = Field(
        default=True, description="Also run all joints over the full window"
    )

    @field_validator("regions")
    @classmethod
    def validate_regions(cls, v: list[Region]) -> list[Region]:
        if not v or len(set(v)) != len(v):
            raise ValueError("regions must be a nonempty list without repeats")
        return v


class AblationCell(BaseModel):
    region: Region
    window: int = Field(ge=1, le=N_WINDOWS)
    repeat: int = Field(ge=0)
    r2: float

    @field_validator("r2")
    @classmethod
    def validate_finite(cls, v: float) -> float:
        if not np.isfinite(v):
            raise ValueError("cell R^2 must be finite")
        return v


class AblationSummary(BaseModel):
    """Mean and SD (n-1; 0 for one repeat) of R^2 over repeats."""

    region: Region
    window: int
    n_frames: int
    r2_mean: float
    r2_sd: float
    repeats: int


class AblationResult(BaseModel):
    spec: ModelSpec
    cells: list[AblationCell]
    summary: list[AblationSummary]
    control: Optional[AblationSummary] = None
    emergence: dict[Region, Optional[int]] = Field(
        description="First window whose mean R^2 exceeds the threshold, per region"
    )
    emergence_threshold: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [s.model_dump(mode="json") for s in self.summary], columns=ABLATION_COLUMNS
        )

    def series(self, region: Region) -> list[AblationSummary]:
        return [s for s in self.summary if s.region == region]


def _run_cell(
    spec_data: dict,
    records: list[PitcherRecord],
    config: TrainConfig,
    region: Region,
    window: int,
    repeat: int,
) -> float:
    spec = model_spec_adapter.validate_python(spec_data)
    try:
        restricted = restrict_corpus(records, RegionMask.of(region), WindowSpec(index=window))
        result = evaluate_losocv(spec, restricted, config, repeat, region, window)
    except (PitchBenchError, ValueError) as e:
        cell = {"region": region.value, "window": window, "repeat": repeat}
        context = {**getattr(e, "context", {}), **cell}
        raise EvaluationError(
            f"ablation cell ({region.value}, w={window}, repeat={repeat}) failed: {e}", **context
        ) from e
    logger.info("Ablation %s w=%d repeat=%d: R^2 = %.4f", region.value, window, repeat, result.r2)
    return result.r2


def summarize_cells(cells: list[AblationCell]) -> list[AblationSummary]:
    """Aggregate repeats per (region, window), in region-then-window order."""
    keys: list[tuple[Region, int]] = []
    for c in cells:
        if (c.region, c.window) not in keys:
            keys.append((c.region, c.window))
    summary = []
    for region, window in keys:
        scores = np.array([c.r2 for c in cells if c.region == region and c.window == window])
        summary.append(
            AblationSummary(
                region=region,
                window=window,
                n_frames=WindowSpec(index=window).n_frames,
                r2_mean=float(scores.mean()),
                r2_sd=float(scores.std(ddof=1)) if len(scores) > 1 else 0.0,
                repeats=len(scores),
            )
        )
    return summary


def emergence_window(series: list[AblationSummary], threshold: float) -> Optional[int]:
    """Earliest window index whose mean R^2 exceeds `threshold`."""
    for s in sorted(series, key=lambda s: s.window):
        if s.r2_mean > threshold:
            return s.window
    return None


def check_rectangular(cells: list[AblationCell], regions: list[Region], repeats: int) -> None:
    windows = range(1, N_WINDOWS + 1)
    expected = {(r, w, k) for r in regions for w in windows for k in range(repeats)}
    seen = [(c.region, c.window, c.repeat) for c in cells]
    if len(seen) != len(set(seen)) or set(seen) != expected:
        raise EvaluationError(
            "ablation grid is not rectangular",
            expected=len(expected),
            got=len(seen),
        )


def run_ablation(
    records: list[PitcherRecord],
    spec: ModelSpec,
    config: TrainConfig,
    ablation: Optional[AblationConfig] = None,
    workers: int = 1,
) -> AblationResult:
    """Evaluate `spec` on every region x window cell, `ablation.repeats` times.

    Cells fan out to the worker pool; every cell's seeds derive from
    (config.seed, fold, repeat, region, window).

    Raises:
        EvaluationError: a cell failed; the context names (region, window, repeat).
    """
    ablation = ablation or AblationConfig()
    spec_data = spec.model_dump()
    windows = range(1, N_WINDOWS + 1)
    tasks = [
        ((region.value, w, k), (spec_data, records, config, region, w, k))
        for region in ablation.regions
        for w in windows
        for k in range(ablation.repeats)
    ]
    if ablation.include_control:
        control_args = (spec_data, records, config, Region.WHOLE_BODY, N_WINDOWS)
        tasks += [(("control", N_WINDOWS, k), (*control_args, k)) for k in range(ablation.repeats)]
    logger.info("Ablation of %s: %d cells x %d pitchers", spec.label, len(tasks), len(records))
    results = run_parallel(_run_cell, tasks, workers)

    cells = [
        AblationCell(region=region, window=w, repeat=k, r2=results[(region.value, w, k)])
        for region in ablation.regions
        for w in windows
        for k in range(ablation.repeats)
    ]
    check_rectangular(cells, ablation.regions, ablation.repeats)
    summary = summarize_cells(cells)

    control = None
    if ablation.include_control:
        control_cells = [
            AblationCell(
                region=Region.WHOLE_BODY,
                window=N_WINDOWS,
                repeat=k,
                r2=results[("control", N_WINDOWS, k)],
            )
            for k in range(ablation.repeats)
        ]
        control = summarize_cells(control_cells)[0]

    emergence = {
        region: emergence_window(
            [s for s in summary if s.region == region], ablation.emergence_threshold
        )
        for region in ablation.regions
    }
    return AblationResult(
        spec=spec,
        cells=cells,
        summary=summary,
        control=control,
        emergence=emergence,
        emergence_threshold=ablation.emergence_threshold,
    )
