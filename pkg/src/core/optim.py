"""Adam optimizer with coupled L2 weight decay, and the MSE loss."""

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from src.common.errors import NonFiniteError, ShapeMismatchError
from src.core.tensor import Tensor, as_tensor


@dataclass
class AdamState:
    """Per-parameter moment buffers and the step counter."""

    learning_rate: float = 0.001
    weight_decay: float = 0.0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    params: Mapping[str, Tensor],
    grads: Mapping[str, np.ndarray],
    state: AdamState,
) -> AdamState:
    """Apply one bias-corrected Adam update in place.

    Weight decay is added to the gradient before the moment updates (L2 form).
    All gradients are validated before any parameter moves, so a rejected step
    leaves parameters and moments untouched.

    Raises:
        NonFiniteError: a gradient contains NaN or inf.
        ShapeMismatchError: a gradient does not match its parameter.
    """
    for name, param in params.items():
        g = grads[name]
        if g.shape != param.shape:
            raise ShapeMismatchError(f"adam_step[{name}]", param.shape, g.shape)
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite gradient for parameter {name!r}", parameter=name)

    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t

    for name, param in params.items():
        g = grads[name]
        if state.weight_decay:
            g = g + state.weight_decay * param.values
        if name not in state.m:
            state.m[name] = np.zeros_like(param.values)
            state.v[name] = np.zeros_like(param.values)

        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)

        m_hat = m / bc1
        v_hat = v / bc2
        param.values -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)

    return state


def mse_loss(pred: Tensor, target: Union[Tensor, np.ndarray]) -> Tensor:
    """Mean of squared differences between two equal-length vectors."""
    target = as_tensor(target)
    if pred.shape != target.shape:
        raise ShapeMismatchError("mse_loss", pred.shape, target.shape)
    if pred.size == 0:
        raise ShapeMismatchError("mse_loss (empty input)", pred.shape, target.shape)
    diff = pred - target
    return (diff * diff).mean()
