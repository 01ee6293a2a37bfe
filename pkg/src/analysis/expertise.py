"""Expertise grouping and per-group prediction error analysis."""

import logging
from itertools import combinations
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from src.analysis.statistical_analysis import (
    DescriptiveStatistics,
    TestResult,
    calculate_descriptive_statistics,
    calibration_slope,
    eta,
    pooled_t_test,
)
from src.common.errors import StatisticsError
from src.dataset.models import CompetitiveLevel, PitcherRecord, PitcherSummary, summarize
from src.harness.evaluation import EvaluationResult

logger = logging.getLogger(__name__)

INTERMEDIATE = "intermediate"
EXPERT = "expert"
GROUPS = (INTERMEDIATE, EXPERT)

GROUPING_COLUMNS = [
    "candidate",
    "intermediate",
    "expert",
    "n_intermediate",
    "n_expert",
    "d_ie",
    "sigma_i",
    "sigma_e",
    "eta",
    "skipped",
]


def candidate_sets() -> list[frozenset[CompetitiveLevel]]:
    """The 15 Intermediate-side level sets: every 1- and 2-level subset."""
    levels = list(CompetitiveLevel)
    return [frozenset(c) for k in (1, 2) for c in combinations(levels, k)]


def _names(levels: frozenset[CompetitiveLevel]) -> str:
    return "+".join(level.value for level in CompetitiveLevel if level in levels)


class GroupingCandidate(BaseModel):
    """One split of the five levels into Intermediate and Expert."""

    intermediate: frozenset[CompetitiveLevel]
    expert: frozenset[CompetitiveLevel]
    n_intermediate: int
    n_expert: int
    d_ie: Optional[float] = Field(default=None, description="|mean_i - mean_e| (mph)")
    sigma_i: Optional[float] = None
    sigma_e: Optional[float] = None
    eta: Optional[float] = Field(default=None, description="None when the candidate is skipped")
    skipped: Optional[str] = None

    @model_validator(mode="after")
    def check_partition(self) -> "GroupingCandidate":
        if self.intermediate & self.expert or self.intermediate | self.expert != set(
            CompetitiveLevel
        ):
            raise ValueError("intermediate and expert levels must partition the five levels")
        return self

    def group_of(self, level: CompetitiveLevel) -> str:
        return INTERMEDIATE if level in self.intermediate else EXPERT


class GroupingSearch(BaseModel):
    candidates: list[GroupingCandidate]
    best: GroupingCandidate

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "candidate": i + 1,
                "intermediate": _names(c.intermediate),
                "expert": _names(c.expert),
                "n_intermediate": c.n_intermediate,
                "n_expert": c.n_expert,
                "d_ie": c.d_ie,
                "sigma_i": c.sigma_i,
                "sigma_e": c.sigma_e,
                "eta": c.eta,
                "skipped": c.skipped or "",
            }
            for i, c in enumerate(self.candidates)
        ]
        return pd.DataFrame(rows, columns=GROUPING_COLUMNS)


def evaluate_candidate(
    summaries: list[PitcherSummary], intermediate: frozenset[CompetitiveLevel]
) -> GroupingCandidate:
    speeds_i = [s.mean_speed for s in summaries if s.level in intermediate]
    speeds_e = [s.mean_speed for s in summaries if s.level not in intermediate]
    candidate = GroupingCandidate(
        intermediate=intermediate,
        expert=frozenset(CompetitiveLevel) - intermediate,
        n_intermediate=len(speeds_i),
        n_expert=len(speeds_e),
    )
    try:
        value = eta(speeds_i, speeds_e)
    except StatisticsError as e:
        logger.warning("Skipping grouping candidate %s: %s", _names(intermediate), e)
        return candidate.model_copy(update={"skipped": str(e)})
    return candidate.model_copy(
        update={
            "d_ie": abs(float(np.mean(speeds_i) - np.mean(speeds_e))),
            "sigma_i": float(np.std(speeds_i, ddof=1)),
            "sigma_e": float(np.std(speeds_e, ddof=1)),
            "eta": value,
        }
    )


def search_grouping(summaries: list[PitcherSummary]) -> GroupingSearch:
    """Score all 15 candidate groupings by eta and return the maximizer.

    Ties keep the earlier candidate (single levels before pairs).

    Raises:
        StatisticsError: a level has no pitchers, or no candidate is scorable.
    """
    present = {s.level for s in summaries}
    absent = [level.value for level in CompetitiveLevel if level not in present]
    if absent:
        raise StatisticsError(f"competitive levels absent from the corpus: {absent}", absent=absent)

    candidates = [evaluate_candidate(summaries, levels) for levels in candidate_sets()]
    scored = [c for c in candidates if c.eta is not None]
    if not scored:
        raise StatisticsError("no grouping candidate has at least 2 pitchers per group")
    best = max(scored, key=lambda c: c.eta)
    logger.info(
        "Best grouping: intermediate=%s expert=%s eta=%.4f",
        _names(best.intermediate),
        _names(best.expert),
        best.eta,
    )
    return GroupingSearch(candidates=candidates, best=best)


class PitcherError(BaseModel):
    pitcher_id: str
    level: CompetitiveLevel
    group: str
    true_mean: float
    predicted_mean: float
    mae: float = Field(ge=0.0, description="Mean absolute pitch error (mph)")
    signed_error: float = Field(description="mean(predicted) - mean(true) (mph)")


class GroupErrors(BaseModel):
    group: str
    absolute: DescriptiveStatistics
    signed: DescriptiveStatistics


class ErrorStats(BaseModel):
    pitchers: list[PitcherError]
    groups: list[GroupErrors]

    def values(self, group: str, kind: str) -> list[float]:
        attr = "mae" if kind == "absolute" else "signed_error"
        return [getattr(p, attr) for p in self.pitchers if p.group == group]

    def group(self, name: str) -> GroupErrors:
        for g in self.groups:
            if g.group == name:
                return g
        raise KeyError(name)


def error_stats(
    evaluation: EvaluationResult,
    records: list[PitcherRecord],
    grouping: GroupingCandidate,
) -> ErrorStats:
    """Per-pitcher MAE and signed error, summarized per group.

    Raises:
        StatisticsError: an evaluated pitcher has no record, or a group is empty.
    """
    levels = {r.id: r.level for r in records}
    missing = [f.test_pitcher_id for f in evaluation.folds if f.test_pitcher_id not in levels]
    if missing:
        raise StatisticsError(f"pitchers without a level: {missing}", pitchers=missing)

    pitchers = []
    for f in evaluation.folds:
        errors = np.asarray(f.predictions) - np.asarray(f.truths)
        level = levels[f.test_pitcher_id]
        pitchers.append(
            PitcherError(
                pitcher_id=f.test_pitcher_id,
                level=level,
                group=grouping.group_of(level),
                true_mean=f.true_mean,
                predicted_mean=f.predicted_mean,
                mae=float(np.mean(np.abs(errors))),
                signed_error=float(np.mean(errors)),
            )
        )

    groups = []
    for name in GROUPS:
        members = [p for p in pitchers if p.group == name]
        if not members:
            raise StatisticsError(f"group {name!r} has no evaluated pitchers")
        groups.append(
            GroupErrors(
                group=name,
                absolute=calculate_descriptive_statistics([p.mae for p in members]),
                signed=calculate_descriptive_statistics([p.signed_error for p in members]),
            )
        )
    return ErrorStats(pitchers=pitchers, groups=groups)


class Analysis1Result(BaseModel):
    grouping: GroupingSearch
    errors: ErrorStats
    absolute_test: Optional[TestResult]
    signed_test: Optional[TestResult]
    test_failures: dict[str, str] = Field(default_factory=dict)
    calibration_slope: Optional[float] = None


def run_analysis1(evaluation: EvaluationResult, records: list[PitcherRecord]) -> Analysis1Result:
    """Grouping search, per-group errors, both t-tests and the calibration slope.

    A t-test that cannot be computed (e.g. zero pooled variance) is recorded
    in `test_failures` instead of aborting the analysis.
    """
    grouping = search_grouping(summarize(records))
    errors = error_stats(evaluation, records, grouping.best)

    tests: dict[str, Optional[TestResult]] = {}
    failures: dict[str, str] = {}
    for kind in ("absolute", "signed"):
        try:
            tests[kind] = pooled_t_test(
                errors.values(INTERMEDIATE, kind),
                errors.values(EXPERT, kind),
                labels=(INTERMEDIATE, EXPERT),
            )
        except StatisticsError as e:
            logger.error("%s-error t-test failed: %s", kind, e)
            tests[kind] = None
            failures[kind] = str(e)

    truths, preds = zip(*evaluation.pairs)
    try:
        slope: Optional[float] = calibration_slope(truths, preds)
    except StatisticsError as e:
        logger.warning("Calibration slope unavailable: %s", e)
        slope = None

    return Analysis1Result(
        grouping=grouping,
        errors=errors,
        absolute_test=tests["absolute"],
        signed_test=tests["signed"],
        test_failures=failures,
        calibration_slope=slope,
    )
