"""Fold-local z-scoring of inputs and targets."""

from typing import Literal

import numpy as np

from src.common.errors import EvaluationError, ShapeMismatchError


class Standardizer:
    """Statistics from training data only, applied to any later batch.

    Inputs are scaled per joint coordinate (pooled over samples and frames);
    a zero spread is replaced by 1 so constant channels map to 0.
    """

    def __init__(self, mode: Literal["channel", "none"] = "channel", target: bool = True):
        self.mode = mode
        self.target = target
        self.input_mean: np.ndarray = np.zeros(())
        self.input_std: np.ndarray = np.ones(())
        self.target_mean = 0.0
        self.target_std = 1.0

    def fit(self, motions: np.ndarray, targets: np.ndarray) -> "Standardizer":
        if motions.shape[0] != targets.shape[0]:
            raise ShapeMismatchError("Standardizer.fit", motions.shape, targets.shape)
        if self.mode == "channel":
            self.input_mean = motions.mean(axis=(0, 1))
            std = motions.std(axis=(0, 1))
            self.input_std = np.where(std > 0, std, 1.0)
        if self.target:
            self.target_mean = float(targets.mean())
            std = float(targets.std())
            self.target_std = std if std > 0 else 1.0
        return self

    def transform_inputs(self, motions: np.ndarray) -> np.ndarray:
        if self.mode == "none":
            return motions
        return (motions - self.input_mean) / self.input_std

    def transform_targets(self, targets: np.ndarray) -> np.ndarray:
        return (targets - self.target_mean) / self.target_std

    def inverse_targets(self, scaled: np.ndarray) -> np.ndarray:
        return scaled * self.target_std + self.target_mean

    def assert_fitted_on(self, motions: np.ndarray, targets: np.ndarray) -> None:
        """Recompute the statistics from `motions` and `targets` and require a match.

        Raises:
            EvaluationError: the fitted statistics came from other rows.
        """
        reference = Standardizer(self.mode, self.target).fit(motions, targets)
        pairs = {
            "input_mean": (self.input_mean, reference.input_mean),
            "input_std": (self.input_std, reference.input_std),
            "target_mean": (self.target_mean, reference.target_mean),
            "target_std": (self.target_std, reference.target_std),
        }
        drift = [
            name
            for name, (fitted, recomputed) in pairs.items()
            if np.shape(fitted) != np.shape(recomputed)
            or not np.allclose(fitted, recomputed, rtol=1e-10, atol=1e-12)
        ]
        if drift:
            raise EvaluationError(
                "standardization statistics differ from the training rows", statistics=drift
            )
