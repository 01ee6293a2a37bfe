"""Minibatch Adam training of a regressor on a fold's training pitches."""

import logging
from dataclasses import dataclass, field

import numpy as np

from src.common.errors import NonFiniteError, ShapeMismatchError
from src.core.optim import AdamState, adam_step, mse_loss
from src.dataset.models import MotionSample
from src.harness.config import TrainConfig
from src.harness.metrics import training_r_squared
from src.harness.standardize import Standardizer
from src.models.regressor import Regressor

logger = logging.getLogger(__name__)

PREDICT_BATCH = 64


@dataclass
class TrainingHistory:
    """Per-epoch losses and train-set R^2."""

    losses: list[float] = field(default_factory=list)
    train_r2: list[float] = field(default_factory=list)
    stopped_early: bool = False

    @property
    def epochs_run(self) -> int:
        return len(self.losses)

    @property
    def final_train_r2(self) -> float:
        return self.train_r2[-1] if self.train_r2 else float("nan")


@dataclass
class TrainedModel:
    model: Regressor
    standardizer: Standardizer
    history: TrainingHistory

    def predict(self, samples: list[MotionSample]) -> np.ndarray:
        return predict(self, samples)


def stack(samples: list[MotionSample]) -> tuple[np.ndarray, np.ndarray]:
    """Motions as one B x T x J x 3 array plus the B ball speeds."""
    if not samples:
        raise ShapeMismatchError("stack (empty sample list)", (0,), (0,))
    shapes = {s.motion.shape for s in samples}
    if len(shapes) > 1:
        first, *rest = sorted(shapes)
        raise ShapeMismatchError("stack", first, rest[0])
    motions = np.stack([s.motion for s in samples])
    targets = np.array([s.ball_speed for s in samples], dtype=np.float64)
    return motions, targets


def _predict_scaled(model: Regressor, inputs: np.ndarray) -> np.ndarray:
    out = [
        model(inputs[i : i + PREDICT_BATCH]).values
        for i in range(0, inputs.shape[0], PREDICT_BATCH)
    ]
    return np.concatenate(out)


def train(
    model: Regressor,
    samples: list[MotionSample],
    config: TrainConfig,
    seed: int = 0,
) -> TrainedModel:
    """Fit `model` on `samples` under the training contract.

    Each epoch reshuffles the data, takes Adam steps on the MSE of the
    standardized target, then measures R^2 on the whole training set in mph.
    Training stops once that R^2 exceeds `config.early_stop_r2` or after
    `config.max_epochs` epochs.

    Raises:
        NonFiniteError: the loss or a gradient became non-finite.
    """
    motions, targets = stack(samples)
    standardizer = Standardizer(config.input_standardization, config.standardize_target)
    standardizer.fit(motions, targets)
    inputs = standardizer.transform_inputs(motions)
    scaled = standardizer.transform_targets(targets)

    rng = np.random.default_rng(seed)
    state = AdamState(learning_rate=config.learning_rate, weight_decay=config.weight_decay)
    history = TrainingHistory()
    n = len(samples)

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for batch_no, start in enumerate(range(0, n, config.batch_size)):
            idx = order[start : start + config.batch_size]
            value = float("nan")
            try:
                model.zero_grad()
                loss = mse_loss(model(inputs[idx]), scaled[idx])
                value = loss.item()
                if not np.isfinite(value):
                    raise NonFiniteError(f"non-finite loss at epoch {epoch}, batch {batch_no}")
                loss.backward()
                grads = {name: p.grad for name, p in model.params.items()}
                adam_step(model.params, grads, state)
            except NonFiniteError as e:
                e.context.update(epoch=epoch, batch=batch_no, loss=value)
                logger.error(
                    "Training diverged at epoch %d, batch %d (loss=%s)", epoch, batch_no, value
                )
                raise
            epoch_loss += value * len(idx)

        fitted = standardizer.inverse_targets(_predict_scaled(model, inputs))
        r2 = training_r_squared(targets, fitted)
        history.losses.append(epoch_loss / n)
        history.train_r2.append(r2)
        logger.debug("epoch %d: loss=%.5f train R^2=%.4f", epoch, epoch_loss / n, r2)
        if r2 > config.early_stop_r2:
            history.stopped_early = True
            break

    return TrainedModel(model=model, standardizer=standardizer, history=history)


def predict(trained: TrainedModel, samples: list[MotionSample]) -> np.ndarray:
    """Ball speeds (mph) predicted for `samples`."""
    motions, _ = stack(samples)
    inputs = trained.standardizer.transform_inputs(motions)
    return trained.standardizer.inverse_targets(_predict_scaled(trained.model, inputs))
