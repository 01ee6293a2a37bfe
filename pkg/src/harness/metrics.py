"""Coefficient of determination."""

import logging
from collections.abc import Sequence

import numpy as np

from src.common.errors import ShapeMismatchError, StatisticsError

logger = logging.getLogger(__name__)


def r_squared(truths: Sequence[float], predictions: Sequence[float]) -> float:
    """1 - SS_res / SS_tot.

    Raises:
        ShapeMismatchError: lengths differ or are zero.
        StatisticsError: all truths identical (SS_tot = 0).
    """
    y = np.asarray(truths, dtype=np.float64)
    y_hat = np.asarray(predictions, dtype=np.float64)
    if y.shape != y_hat.shape or y.size == 0:
        raise ShapeMismatchError("r_squared", y.shape, y_hat.shape)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise StatisticsError("R^2 undefined: all truths are identical", n=int(y.size))
    ss_res = float(np.sum((y_hat - y) ** 2))
    return 1.0 - ss_res / ss_tot


def training_r_squared(truths: Sequence[float], predictions: Sequence[float]) -> float:
    """R^2 for the early-stopping rule; a constant target counts as 0."""
    try:
        return r_squared(truths, predictions)
    except StatisticsError:
        logger.warning("Constant training target; treating train R^2 as 0")
        return 0.0
