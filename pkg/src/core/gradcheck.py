"""Central finite-difference gradient checking."""

from collections.abc import Callable, Sequence

import numpy as np
from pydantic import BaseModel, Field

from src.core.tensor import Tensor


class GradcheckReport(BaseModel):
    """Worst-case disagreement between analytic and numeric gradients."""

    max_abs_error: float = Field(description="Largest |analytic - numeric|")
    max_rel_error: float = Field(description="Largest error relative to max(|analytic|, |numeric|)")
    checked: int = Field(description="Number of scalar entries perturbed", ge=0)
    passed: bool = Field(description="Every entry within atol + rtol * scale")


def gradcheck(
    fn: Callable[[], Tensor],
    tensors: Sequence[Tensor],
    eps: float = 1e-5,
    rtol: float = 1e-4,
    atol: float = 1e-8,
) -> GradcheckReport:
    """Compare `backward` gradients of `fn()` against central differences.

    Args:
        fn: Builds a scalar loss from the current values of `tensors`.
        tensors: Leaves requiring gradients; perturbed in place and restored.
        eps: Perturbation step.
        rtol: Relative tolerance.
        atol: Absolute floor.

    Returns:
        GradcheckReport summarizing the worst entry.
    """
    for t in tensors:
        t.zero_grad()
    fn().backward()
    analytic = [t.grad.copy() for t in tensors]

    max_abs = 0.0
    max_rel = 0.0
    checked = 0
    passed = True
    for t, grad in zip(tensors, analytic):
        flat = t.values.reshape(-1)
        g_flat = grad.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            plus = fn().item()
            flat[i] = original - eps
            minus = fn().item()
            flat[i] = original
            numeric = (plus - minus) / (2.0 * eps)

            err = abs(g_flat[i] - numeric)
            scale = max(abs(g_flat[i]), abs(numeric))
            max_abs = max(max_abs, err)
            if scale > atol:
                max_rel = max(max_rel, err / scale)
            if err > atol + rtol * scale:
                passed = False
            checked += 1

    return GradcheckReport(
        max_abs_error=float(max_abs),
        max_rel_error=float(max_rel),
        checked=checked,
        passed=passed,
    )


def random_tensor(rng: np.random.Generator, *shape: int, scale: float = 1.0) -> Tensor:
    """Gradient-requiring tensor with uniform entries in ±scale."""
    return Tensor(rng.uniform(-scale, scale, size=shape), requires_grad=True)
