"""Common base of the scalar regressors."""

from abc import ABC, abstractmethod
from typing import Any

import numpy as np

from src.common.errors import ModelConfigError, NonFiniteError, ShapeMismatchError
from src.core.tensor import Tensor
from src.dataset.models import N_COORDS


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class Regressor(ABC):
    """Maps a batch of restricted motions (B x T x J x 3) to B scalars.

    Parameters live in `params`, keyed by stable names; registration order
    is the checkpoint order.
    """

    architecture: str = ""

    def __init__(self, spec: Any, n_joints: int, n_frames: int, seed: int = 0):
        if n_joints < 1 or n_frames < 1:
            raise ModelConfigError(
                f"input needs at least one joint and one frame, got J={n_joints}, T={n_frames}",
                n_joints=n_joints,
                n_frames=n_frames,
            )
        self.spec = spec
        self.n_joints = n_joints
        self.n_frames = n_frames
        self.params: dict[str, Tensor] = {}
        self._rng = np.random.default_rng(seed)

    def weight(self, name: str, fan_in: int, fan_out: int) -> Tensor:
        return self._register(name, glorot_uniform(self._rng, fan_in, fan_out))

    def bias(self, name: str, width: int, fill: float = 0.0) -> Tensor:
        return self._register(name, np.full(width, fill))

    def _register(self, name: str, values: np.ndarray) -> Tensor:
        if name in self.params:
            raise ModelConfigError(f"duplicate parameter name {name!r}")
        t = Tensor(values, requires_grad=True, name=name)
        self.params[name] = t
        return t

    @property
    def parameter_count(self) -> int:
        return sum(p.size for p in self.params.values())

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def check_input(self, batch: np.ndarray) -> np.ndarray:
        """Validate a batch against the model's input dimensions.

        Raises:
            ShapeMismatchError: batch is not B x T x J x 3 for this model.
        """
        batch = np.asarray(batch, dtype=np.float64)
        expected = (self.n_frames, self.n_joints, N_COORDS)
        if batch.ndim != 4 or batch.shape[1:] != expected:
            raise ShapeMismatchError(f"{self.architecture}.forward", (-1,) + expected, batch.shape)
        return batch

    @abstractmethod
    def _forward(self, batch: np.ndarray) -> Tensor:
        """Predictions of shape (B,) for a validated batch."""

    def forward(self, batch: np.ndarray) -> Tensor:
        out = self._forward(self.check_input(batch))
        if not np.all(np.isfinite(out.values)):
            raise NonFiniteError(f"{self.architecture}: non-finite prediction")
        return out

    __call__ = forward

    def state(self) -> dict[str, np.ndarray]:
        return {name: p.values.copy() for name, p in self.params.items()}

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        """Copy parameter values in; names and shapes must match exactly."""
        if set(state) != set(self.params):
            missing = sorted(set(self.params) - set(state))
            extra = sorted(set(state) - set(self.params))
            raise ModelConfigError(
                f"checkpoint does not match model (missing {missing}, unexpected {extra})"
            )
        for name, p in self.params.items():
            values = np.asarray(state[name], dtype=np.float64)
            if values.shape != p.shape:
                raise ShapeMismatchError(f"load_state[{name}]", p.shape, values.shape)
            p.values = values.copy()

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}({self.spec.label}, J={self.n_joints}, T={self.n_frames}, "
            f"params={self.parameter_count})"
        )


def forward(model: Regressor, batch: np.ndarray) -> Tensor:
    """One finite scalar prediction per sample of `batch`."""
    return model.forward(batch)
