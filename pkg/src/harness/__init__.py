"""Training contract, folds, LOSOCV and within-individual evaluation."""

from src.harness.config import TrainConfig
from src.harness.evaluation import (
    BaselineRow,
    BaselineSelection,
    EvaluationResult,
    FoldOutcome,
    WithinIndividualResult,
    evaluate_losocv,
    evaluate_within_individual,
    select_baseline,
)
from src.harness.folds import Fold, Split, losocv_folds, within_individual_split
from src.harness.metrics import r_squared
from src.harness.pool import run_parallel
from src.harness.seeds import derive_seed
from src.harness.standardize import Standardizer
from src.harness.training import TrainedModel, TrainingHistory, predict, train

__all__ = [
    "BaselineRow",
    "BaselineSelection",
    "EvaluationResult",
    "Fold",
    "FoldOutcome",
    "Split",
    "Standardizer",
    "TrainConfig",
    "TrainedModel",
    "TrainingHistory",
    "WithinIndividualResult",
    "derive_seed",
    "evaluate_losocv",
    "evaluate_within_individual",
    "losocv_folds",
    "predict",
    "r_squared",
    "run_parallel",
    "select_baseline",
    "train",
    "within_individual_split",
]
