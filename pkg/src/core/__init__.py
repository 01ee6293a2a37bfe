"""Dense tensor math, reverse-mode autodiff and the Adam optimizer."""

from src.core.gradcheck import GradcheckReport, gradcheck, random_tensor
from src.core.optim import AdamState, adam_step, mse_loss
from src.core.tensor import (
    Node,
    Tape,
    Tensor,
    add,
    as_tensor,
    backward,
    concat,
    layer_norm,
    matmul,
    mean,
    mul,
    relu,
    reshape,
    sigmoid,
    softmax,
    sub,
    sum_,
    take,
    tanh,
    transpose,
)

__all__ = [
    "AdamState",
    "GradcheckReport",
    "Node",
    "Tape",
    "Tensor",
    "adam_step",
    "add",
    "as_tensor",
    "backward",
    "concat",
    "gradcheck",
    "layer_norm",
    "matmul",
    "mean",
    "mse_loss",
    "mul",
    "random_tensor",
    "relu",
    "reshape",
    "sigmoid",
    "softmax",
    "sub",
    "sum_",
    "take",
    "tanh",
    "transpose",
]
