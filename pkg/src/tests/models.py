"""Builders for small records and evaluation results used across test phases."""

from collections.abc import Callable, Sequence
from typing import Optional

import numpy as np

from src.dataset.models import (
    JOINT_ORDER,
    CompetitiveLevel,
    Handedness,
    MotionSample,
    PitcherRecord,
)
from src.harness.evaluation import EvaluationResult, FoldOutcome
from src.harness.metrics import r_squared
from src.models.specs import ModelSpec, TransformerSpec

LEVELS = list(CompetitiveLevel)

ErrorFn = Callable[[int, PitcherRecord], Sequence[float]]


def make_records(
    n_pitchers: int,
    pitches: int = 5,
    n_frames: int = 2,
    n_joints: int = 1,
    seed: int = 0,
) -> list[PitcherRecord]:
    """Hand-built records with random motion; levels cycle, speeds stay in the band."""
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n_pitchers):
        pid = f"T{i:03d}"
        samples = [
            MotionSample(
                motion=rng.standard_normal((n_frames, n_joints, 3)),
                ball_speed=float(70.0 + 10.0 * rng.random()),
                pitcher_id=pid,
                pitch_index=k,
                joints=tuple(JOINT_ORDER[:n_joints]),
            )
            for k in range(pitches)
        ]
        records.append(
            PitcherRecord(
                id=pid,
                level=LEVELS[i % len(LEVELS)],
                handedness=Handedness.RIGHT,
                pitches=samples,
            )
        )
    return records


def fake_evaluation(
    records: list[PitcherRecord],
    error: ErrorFn,
    spec: Optional[ModelSpec] = None,
) -> EvaluationResult:
    """LOSOCV-shaped result whose per-pitch errors come from `error(i, record)`."""
    spec = spec or TransformerSpec(heads=1, d_l=4, d_f=8, layers=1)
    folds = []
    for i, record in enumerate(records):
        truths = [p.ball_speed for p in record.pitches]
        offsets = list(error(i, record))
        folds.append(
            FoldOutcome(
                fold=i,
                test_pitcher_id=record.id,
                predictions=[t + e for t, e in zip(truths, offsets)],
                truths=truths,
                epochs_run=1,
                train_r2=0.5,
            )
        )
    r2 = r_squared([f.true_mean for f in folds], [f.predicted_mean for f in folds])
    return EvaluationResult(spec=spec, parameter_count=0, folds=folds, r2=r2)
