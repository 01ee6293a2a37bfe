"""Dense float64 tensors with reverse-mode automatic differentiation.

A `Tensor` wraps a numpy buffer. Every operation whose inputs require
gradients records a `Node` (inputs plus a backward rule) on its output; the
`Tape` built from a scalar loss is the topologically ordered list of those
nodes, and `backward` walks it in reverse exactly once per node.

There is no global graph state: a tape is derived from the tensors reachable
from one loss, so independent training contexts never share mutable state.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any, Optional, Union

import numpy as np
from scipy.special import expit

from src.common.errors import BackwardError, NonFiniteError, ShapeMismatchError

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]
Operand = Union["Tensor", float, int, np.ndarray]

LAYER_NORM_EPS = 1e-5


@dataclass(eq=False)
class Node:
    """One recorded operation: its output, inputs and backward rule."""

    op: str
    output: Tensor
    inputs: tuple[Tensor, ...]
    backward_fn: BackwardFn


class Tensor:
    """Float64 tensor with optional gradient buffer."""

    __array_priority__ = 100.0  # ndarray <op> Tensor defers to Tensor

    def __init__(
        self,
        values: Any,
        requires_grad: bool = False,
        name: Optional[str] = None,
    ):
        self.values = np.array(values, dtype=np.float64)
        self.requires_grad = requires_grad
        self.name = name
        self.grad: Optional[np.ndarray] = np.zeros_like(self.values) if requires_grad else None
        self.node: Optional[Node] = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def size(self) -> int:
        return int(self.values.size)

    def item(self) -> float:
        if self.values.size != 1:
            raise ShapeMismatchError("item", self.shape, ())
        return float(self.values.reshape(()))

    def numpy(self) -> np.ndarray:
        return self.values.copy()

    def zero_grad(self) -> None:
        if self.requires_grad:
            self.grad = np.zeros_like(self.values)

    def backward(self) -> None:
        backward(self)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"

    # Arithmetic

    def __add__(self, other: Operand) -> Tensor:
        return add(self, other)

    def __radd__(self, other: Operand) -> Tensor:
        return add(other, self)

    def __sub__(self, other: Operand) -> Tensor:
        return sub(self, other)

    def __rsub__(self, other: Operand) -> Tensor:
        return sub(other, self)

    def __mul__(self, other: Operand) -> Tensor:
        return mul(self, other)

    def __rmul__(self, other: Operand) -> Tensor:
        return mul(other, self)

    def __truediv__(self, other: float) -> Tensor:
        if isinstance(other, Tensor):
            raise ShapeMismatchError("div", self.shape, other.shape)
        return mul(self, 1.0 / float(other))

    def __neg__(self) -> Tensor:
        return neg(self)

    def __matmul__(self, other: Operand) -> Tensor:
        return matmul(self, other)

    def __rmatmul__(self, other: Operand) -> Tensor:
        return matmul(other, self)

    def __getitem__(self, index: Any) -> Tensor:
        return take(self, index)

    # Method forms

    def sum(self, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape: int) -> Tensor:
        return reshape(self, shape)

    def transpose(self, *axes: int) -> Tensor:
        return transpose(self, axes or None)

    def relu(self) -> Tensor:
        return relu(self)

    def sigmoid(self) -> Tensor:
        return sigmoid(self)

    def tanh(self) -> Tensor:
        return tanh(self)

    def softmax(self) -> Tensor:
        return softmax(self)


def as_tensor(value: Operand) -> Tensor:
    """Wrap constants; tensors pass through unchanged."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _result(op: str, values: np.ndarray, inputs: tuple[Tensor, ...], fn: BackwardFn) -> Tensor:
    if not np.all(np.isfinite(values)):
        raise NonFiniteError(f"{op}: non-finite values in forward result", op=op)
    out = Tensor(values)
    if any(t.requires_grad for t in inputs):
        out.requires_grad = True
        out.node = Node(op=op, output=out, inputs=inputs, backward_fn=fn)
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_check(op: str, a: Tensor, b: Tensor) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeMismatchError(op, a.shape, b.shape) from None


# Elementwise


def add(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_check("add", a, b)

    def fn(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _result("add", a.values + b.values, (a, b), fn)


def sub(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_check("sub", a, b)

    def fn(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return _result("sub", a.values - b.values, (a, b), fn)


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_check("mul", a, b)

    def fn(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return _unbroadcast(g * b.values, a.shape), _unbroadcast(g * a.values, b.shape)

    return _result("mul", a.values * b.values, (a, b), fn)


def neg(a: Tensor) -> Tensor:
    return _result("neg", -a.values, (a,), lambda g: (-g,))


def relu(a: Tensor) -> Tensor:
    mask = a.values > 0
    return _result("relu", np.where(mask, a.values, 0.0), (a,), lambda g: (g * mask,))


def sigmoid(a: Tensor) -> Tensor:
    s = expit(a.values)
    return _result("sigmoid", s, (a,), lambda g: (g * s * (1.0 - s),))


def tanh(a: Tensor) -> Tensor:
    t = np.tanh(a.values)
    return _result("tanh", t, (a,), lambda g: (g * (1.0 - t * t),))


# Linear algebra and reductions


def matmul(a: Operand, b: Operand) -> Tensor:
    """Batched matrix product over the last two axes; batch axes broadcast."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeMismatchError("matmul", a.shape, b.shape)
    try:
        np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    except ValueError:
        raise ShapeMismatchError("matmul", a.shape, b.shape) from None

    def fn(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ga = g @ np.swapaxes(b.values, -1, -2)
        gb = np.swapaxes(a.values, -1, -2) @ g
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return _result("matmul", a.values @ b.values, (a, b), fn)


def sum_(a: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    def fn(g: np.ndarray) -> tuple[np.ndarray]:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _result("sum", np.sum(a.values, axis=axis, keepdims=keepdims), (a,), fn)


def mean(a: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    count = a.size if axis is None else a.shape[axis]

    def fn(g: np.ndarray) -> tuple[np.ndarray]:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g / count, a.shape).copy(),)

    return _result("mean", np.mean(a.values, axis=axis, keepdims=keepdims), (a,), fn)


def softmax(a: Tensor) -> Tensor:
    """Softmax over the last axis, max-subtracted."""
    shifted = a.values - a.values.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=-1, keepdims=True)

    def fn(g: np.ndarray) -> tuple[np.ndarray]:
        return (s * (g - np.sum(g * s, axis=-1, keepdims=True)),)

    return _result("softmax", s, (a,), fn)


def layer_norm(
    a: Tensor,
    gamma: Optional[Tensor] = None,
    beta: Optional[Tensor] = None,
    eps: float = LAYER_NORM_EPS,
) -> Tensor:
    """Layer normalization over the last axis with optional affine terms."""
    width = a.shape[-1]
    for name, p in (("gamma", gamma), ("beta", beta)):
        if p is not None and p.shape != (width,):
            raise ShapeMismatchError(f"layer_norm.{name}", a.shape, p.shape)

    mu = a.values.mean(axis=-1, keepdims=True)
    centered = a.values - mu
    var = np.mean(centered * centered, axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv
    g_vals = gamma.values if gamma is not None else 1.0
    out = xhat * g_vals + (beta.values if beta is not None else 0.0)

    inputs: tuple[Tensor, ...] = (a,)
    if gamma is not None:
        inputs += (gamma,)
    if beta is not None:
        inputs += (beta,)

    def fn(g: np.ndarray) -> list[np.ndarray]:
        gx_hat = g * g_vals
        ga = (inv / width) * (
            width * gx_hat
            - gx_hat.sum(axis=-1, keepdims=True)
            - xhat * np.sum(gx_hat * xhat, axis=-1, keepdims=True)
        )
        grads = [ga]
        lead = tuple(range(g.ndim - 1))
        if gamma is not None:
            grads.append(np.sum(g * xhat, axis=lead))
        if beta is not None:
            grads.append(np.sum(g, axis=lead))
        return grads

    return _result("layer_norm", out, inputs, fn)


# Shape manipulation


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    shape = tuple(shape[0]) if len(shape) == 1 and isinstance(shape[0], tuple) else tuple(shape)
    try:
        values = a.values.reshape(shape)
    except ValueError:
        raise ShapeMismatchError("reshape", a.shape, shape) from None
    return _result("reshape", values, (a,), lambda g: (g.reshape(a.shape),))


def transpose(a: Tensor, axes: Optional[Sequence[int]] = None) -> Tensor:
    if axes is None:
        axes = tuple(reversed(range(a.ndim)))
    axes = tuple(axes)
    if sorted(axes) != list(range(a.ndim)):
        raise ShapeMismatchError("transpose", a.shape, axes)
    inverse = tuple(np.argsort(axes))
    return _result("transpose", a.values.transpose(axes), (a,), lambda g: (g.transpose(inverse),))


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    if not tensors:
        raise ShapeMismatchError("concat", (), ())
    try:
        values = np.concatenate([t.values for t in tensors], axis=axis)
    except ValueError:
        raise ShapeMismatchError("concat", tensors[0].shape, tensors[-1].shape) from None
    sizes = [t.shape[axis] for t in tensors]
    cuts = np.cumsum(sizes)[:-1]

    def fn(g: np.ndarray) -> list[np.ndarray]:
        return list(np.split(g, cuts, axis=axis))

    return _result("concat", values, tuple(tensors), fn)


def _is_basic_index(index: Any) -> bool:
    parts = index if isinstance(index, tuple) else (index,)
    return all(isinstance(p, (int, np.integer, slice)) or p is Ellipsis for p in parts)


def take(a: Tensor, index: Any) -> Tensor:
    """Basic or advanced indexing.

    Basic indexing selects each element at most once, so the gradient is
    assigned; advanced indexing may repeat elements and scatters with `np.add.at`.
    """
    values = a.values[index]
    basic = _is_basic_index(index)

    def fn(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros_like(a.values)
        if basic:
            full[index] = g
        else:
            np.add.at(full, index, g)
        return (full,)

    return _result("take", np.array(values), (a,), fn)


# Backward


class Tape:
    """Topologically ordered operations reachable from a loss."""

    def __init__(self, nodes: list[Node]):
        self.nodes = nodes

    def __len__(self) -> int:
        return len(self.nodes)

    @classmethod
    def from_loss(cls, loss: Tensor) -> Tape:
        """Collect recorded nodes so every node follows all of its inputs.

        Iterative post-order DFS; recurrent unrolls are deep enough to exceed
        the interpreter's recursion limit.
        """
        order: list[Node] = []
        visited: set[int] = set()
        if loss.node is None:
            return cls(order)
        stack: list[tuple[Node, bool]] = [(loss.node, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for inp in node.inputs:
                if inp.node is not None and id(inp.node) not in visited:
                    stack.append((inp.node, False))
        return cls(order)


def backward(loss: Tensor) -> Tape:
    """Populate `.grad` on every gradient-requiring tensor reachable from `loss`.

    Leaf gradients accumulate into their existing buffers; call `zero_grad`
    between steps.
    """
    if loss.size != 1:
        raise BackwardError(f"backward needs a scalar loss, got shape {loss.shape}", shape=loss.shape)
    tape = Tape.from_loss(loss)
    if not tape.nodes:
        raise BackwardError("backward called on a loss with an empty tape")

    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.values)}
    leaves: dict[int, Tensor] = {}
    for node in reversed(tape.nodes):
        g_out = grads.pop(id(node.output), None)
        if g_out is None:
            continue
        node.output.grad = g_out
        for inp, g_in in zip(node.inputs, node.backward_fn(g_out)):
            if g_in is None or not inp.requires_grad:
                continue
            if inp.node is None:
                leaves[id(inp)] = inp
            key = id(inp)
            grads[key] = grads[key] + g_in if key in grads else g_in

    for key, leaf in leaves.items():
        g = grads[key]
        leaf.grad = g.copy() if leaf.grad is None else leaf.grad + g
    return tape
