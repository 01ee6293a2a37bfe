"""Cross-individual (LOSOCV) and within-individual evaluation, baseline selection."""

import logging
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator, model_validator

from src.common.errors import EvaluationError, PitchBenchError
from src.dataset.corpus import PITCHES_PER_PITCHER
from src.dataset.models import MotionSample, PitcherRecord, Region
from src.harness.config import TrainConfig
from src.harness.folds import Fold, losocv_folds, within_individual_split
from src.harness.metrics import r_squared
from src.harness.pool import run_parallel
from src.harness.seeds import derive_seed
from src.harness.training import predict, stack, train
from src.models.factory import build_model
from src.models.specs import ModelSpec, model_spec_adapter, parameter_count

logger = logging.getLogger(__name__)

FOLD_COLUMNS = [
    "spec",
    "repeat",
    "fold",
    "pitcher_id",
    "true_mean",
    "predicted_mean",
    "epochs_run",
    "train_r2",
    "stopped_early",
]


class FoldOutcome(BaseModel):
    """Predictions for the held-out pitcher of one LOSOCV fold."""

    fold: int
    test_pitcher_id: str
    predictions: list[float] = Field(description="Per-pitch predicted speed (mph)")
    truths: list[float] = Field(description="Per-pitch measured speed (mph)")
    epochs_run: int = Field(ge=1)
    train_r2: float
    stopped_early: bool = False

    @field_validator("predictions")
    @classmethod
    def validate_finite(cls, v: list[float]) -> list[float]:
        if not v or not np.all(np.isfinite(v)):
            raise ValueError("fold predictions must be finite and nonempty")
        return v

    @model_validator(mode="after")
    def validate_lengths(self) -> "FoldOutcome":
        if len(self.predictions) != len(self.truths):
            raise ValueError(
                f"{len(self.predictions)} predictions for {len(self.truths)} test pitches"
            )
        if len(self.truths) != PITCHES_PER_PITCHER:
            raise ValueError(
                f"fold {self.fold} holds {len(self.truths)} test pitches, "
                f"expected {PITCHES_PER_PITCHER}"
            )
        return self

    @property
    def predicted_mean(self) -> float:
        return float(np.mean(self.predictions))

    @property
    def true_mean(self) -> float:
        return float(np.mean(self.truths))


class EvaluationResult(BaseModel):
    """LOSOCV outcome of one spec: per-pitcher mean pairs and their R^2."""

    spec: ModelSpec
    repeat: int = 0
    parameter_count: int
    folds: list[FoldOutcome]
    r2: float = Field(le=1.0, description="Cross-individual R^2 over pitcher means")

    @property
    def pairs(self) -> list[tuple[float, float]]:
        """(true mean, predicted mean) per pitcher, in fold order."""
        return [(f.true_mean, f.predicted_mean) for f in self.folds]

    def outcome(self, pitcher_id: str) -> Optional[FoldOutcome]:
        for f in self.folds:
            if f.test_pitcher_id == pitcher_id:
                return f
        return None

    def to_frame(self) -> pd.DataFrame:
        """One row per fold."""
        rows = [
            {
                "spec": self.spec.label,
                "repeat": self.repeat,
                "fold": f.fold,
                "pitcher_id": f.test_pitcher_id,
                "true_mean": f.true_mean,
                "predicted_mean": f.predicted_mean,
                "epochs_run": f.epochs_run,
                "train_r2": f.train_r2,
                "stopped_early": f.stopped_early,
            }
            for f in self.folds
        ]
        return pd.DataFrame(rows, columns=FOLD_COLUMNS)


class WithinIndividualResult(BaseModel):
    """Held-out pitches from pitchers that also appear in training."""

    spec: ModelSpec
    r2: float = Field(description="R^2 over the individual test pitches (primary)")
    pitcher_mean_r2: float = Field(
        description="R^2 of each test prediction against the pitcher's mean speed"
    )
    n_train: int
    n_test: int
    epochs_run: int
    predictions: list[float]
    truths: list[float]
    pitcher_ids: list[str]


class BaselineRow(BaseModel):
    spec: ModelSpec
    parameter_count: int
    r2_mean: float
    r2_sd: float
    repeats: int
    rank: int = 0


class BaselineSelection(BaseModel):
    """Grid ranked by cross-individual R^2, best first."""

    rows: list[BaselineRow]
    evaluations: list[EvaluationResult] = Field(
        description="First-repeat LOSOCV result of every spec, in grid order"
    )

    @property
    def best(self) -> BaselineRow:
        return self.rows[0]

    def evaluation_of(self, spec: ModelSpec) -> EvaluationResult:
        for e in self.evaluations:
            if e.spec == spec:
                return e
        raise KeyError(spec.label)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "rank": r.rank,
                    "spec": r.spec.label,
                    "architecture": r.spec.architecture,
                    "parameters": r.parameter_count,
                    "r2_mean": r.r2_mean,
                    "r2_sd": r.r2_sd,
                    "repeats": r.repeats,
                }
                for r in self.rows
            ],
            columns=["rank", "spec", "architecture", "parameters", "r2_mean", "r2_sd", "repeats"],
        )


def _model_seeds(seed: int) -> tuple[int, int]:
    init, shuffle = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint32)
    return int(init), int(shuffle)


def fit_and_predict(
    spec_data: dict,
    train_set: list[MotionSample],
    test_set: list[MotionSample],
    config: TrainConfig,
    seed: int,
) -> tuple[list[float], int, float, bool]:
    """Train a fresh model on `train_set` and predict `test_set`.

    Module-level so worker processes can run it; the spec travels as a dict.
    """
    spec = model_spec_adapter.validate_python(spec_data)
    init_seed, shuffle_seed = _model_seeds(seed)
    sample = train_set[0]
    model = build_model(spec, sample.joints, sample.n_frames, init_seed)
    trained = train(model, train_set, config, shuffle_seed)
    trained.standardizer.assert_fitted_on(*stack(train_set))
    predictions = predict(trained, test_set)
    history = trained.history
    return (
        [float(p) for p in predictions],
        history.epochs_run,
        history.final_train_r2,
        history.stopped_early,
    )


def _run_fold(
    spec_data: dict, fold: Fold, config: TrainConfig, seed: int
) -> tuple[list[float], int, float, bool]:
    try:
        return fit_and_predict(spec_data, fold.train, fold.test, config, seed)
    except PitchBenchError as e:
        context = {
            **e.context,
            "pitcher_id": fold.test_pitcher_id,
            "fold": fold.index,
            "cause": type(e).__name__,
        }
        raise EvaluationError(
            f"fold {fold.index} (test pitcher {fold.test_pitcher_id}) failed: {e}", **context
        ) from e


def evaluate_losocv(
    spec: ModelSpec,
    records: list[PitcherRecord],
    config: TrainConfig,
    repeat: int = 0,
    region: Optional[Region] = None,
    window: Optional[int] = None,
    workers: int = 1,
) -> EvaluationResult:
    """Train one fresh model per held-out pitcher and score the pitcher means.

    Fold seeds derive from (config.seed, fold, repeat, region, window).

    Raises:
        EvaluationError: a fold failed; the context names the pitcher.
    """
    folds = losocv_folds(records)
    spec_data = spec.model_dump()
    tasks = [
        (
            fold.index,
            (spec_data, fold, config, derive_seed(config.seed, fold.index, repeat, region, window)),
        )
        for fold in folds
    ]
    results = run_parallel(_run_fold, tasks, workers)

    outcomes = []
    for fold in folds:
        predictions, epochs, train_r2, stopped = results[fold.index]
        outcomes.append(
            FoldOutcome(
                fold=fold.index,
                test_pitcher_id=fold.test_pitcher_id,
                predictions=predictions,
                truths=[s.ball_speed for s in fold.test],
                epochs_run=epochs,
                train_r2=train_r2,
                stopped_early=stopped,
            )
        )
        logger.debug(
            "%s fold %d (%s): true=%.2f predicted=%.2f epochs=%d",
            spec.label,
            fold.index,
            fold.test_pitcher_id,
            outcomes[-1].true_mean,
            outcomes[-1].predicted_mean,
            epochs,
        )

    truths = [o.true_mean for o in outcomes]
    preds = [o.predicted_mean for o in outcomes]
    r2 = r_squared(truths, preds)
    sample = records[0].pitches[0]
    logger.info("%s repeat %d: cross-individual R^2 = %.4f", spec.label, repeat, r2)
    return EvaluationResult(
        spec=spec,
        repeat=repeat,
        parameter_count=parameter_count(spec, sample.n_joints, sample.n_frames),
        folds=outcomes,
        r2=r2,
    )


def evaluate_within_individual(
    spec: ModelSpec,
    records: list[PitcherRecord],
    config: TrainConfig,
    repeat: int = 0,
) -> WithinIndividualResult:
    """Train on four pitches per pitcher and predict each pitcher's fifth."""
    split_seed = derive_seed(config.seed, fold=0, repeat=repeat, protocol="within_individual")
    split = within_individual_split(records, split_seed)
    model_seed = derive_seed(config.seed, fold=1, repeat=repeat, protocol="within_individual")
    predictions, epochs, _, _ = fit_and_predict(
        spec.model_dump(), split.train, split.test, config, model_seed
    )
    truths = [s.ball_speed for s in split.test]
    means = {r.id: r.mean_speed for r in records}
    ids = [s.pitcher_id for s in split.test]
    result = WithinIndividualResult(
        spec=spec,
        r2=r_squared(truths, predictions),
        pitcher_mean_r2=r_squared([means[i] for i in ids], predictions),
        n_train=len(split.train),
        n_test=len(split.test),
        epochs_run=epochs,
        predictions=predictions,
        truths=truths,
        pitcher_ids=ids,
    )
    logger.info("%s: within-individual R^2 = %.4f", spec.label, result.r2)
    return result


def select_baseline(
    grid: list[ModelSpec],
    records: list[PitcherRecord],
    config: TrainConfig,
    workers: int = 1,
) -> BaselineSelection:
    """Evaluate every spec with LOSOCV and rank by mean cross-individual R^2.

    Ties go to the spec with fewer parameters, then to grid order.
    """
    if not grid:
        raise EvaluationError("model grid is empty")
    rows: list[tuple[int, BaselineRow]] = []
    evaluations = []
    for position, spec in enumerate(grid):
        runs = [
            evaluate_losocv(spec, records, config, repeat=k, workers=workers)
            for k in range(config.selection_repeats)
        ]
        evaluations.append(runs[0])
        scores = np.array([run.r2 for run in runs])
        row = BaselineRow(
            spec=spec,
            parameter_count=runs[0].parameter_count,
            r2_mean=float(scores.mean()),
            r2_sd=float(scores.std(ddof=1)) if len(scores) > 1 else 0.0,
            repeats=len(scores),
        )
        rows.append((position, row))

    rows.sort(key=lambda item: (-item[1].r2_mean, item[1].parameter_count, item[0]))
    ranked = [row.model_copy(update={"rank": i + 1}) for i, (_, row) in enumerate(rows)]
    logger.info("Best baseline: %s (R^2 = %.4f)", ranked[0].spec.label, ranked[0].r2_mean)
    return BaselineSelection(rows=ranked, evaluations=evaluations)
