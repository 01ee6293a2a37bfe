"""Exception hierarchy shared by every package.

Each error carries a `context` dictionary with the structured details
(operation, shapes, pitcher id, ablation cell, ...) so the CLI can log them
and echo them into run manifests.
"""

from typing import Any


class PitchBenchError(Exception):
    """Base class for all benchmark errors."""

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.context: dict[str, Any] = context

    def to_dict(self) -> dict[str, Any]:
        """Serializable view used in run manifests."""
        return {
            "type": type(self).__name__,
            "message": str(self),
            "context": {k: _jsonable(v) for k, v in self.context.items()},
        }

    def __reduce__(self) -> tuple:
        # Worker processes send errors back pickled; keep message and context
        return _rebuild, (type(self), str(self), self.context)


class ShapeMismatchError(PitchBenchError, ValueError):
    """Operand shapes do not conform for an operation."""

    def __init__(self, op: str, left: tuple[int, ...], right: tuple[int, ...]):
        super().__init__(
            f"{op}: shape mismatch {left} vs {right}", op=op, left=left, right=right
        )


class NonFiniteError(PitchBenchError, ArithmeticError):
    """A forward value, gradient or loss became NaN or infinite."""


class BackwardError(PitchBenchError, RuntimeError):
    """Backward pass requested on an invalid graph."""


class SignalError(PitchBenchError, ValueError):
    """Invalid input to a signal-preparation step."""


class CorpusError(PitchBenchError, ValueError):
    """Malformed corpus file or pitch counts that violate the dataset contract."""


class ModelConfigError(PitchBenchError, ValueError):
    """Invalid model specification or input dimensions."""


class EvaluationError(PitchBenchError, RuntimeError):
    """Failure while training or evaluating a fold or an ablation cell."""


class StatisticsError(PitchBenchError, ValueError):
    """Degenerate input to a statistical computation."""


class ReportError(PitchBenchError, RuntimeError):
    """Missing or unreadable artifacts while building a report."""


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return str(value)


def _rebuild(cls: type, message: str, context: dict[str, Any]) -> PitchBenchError:
    error = cls.__new__(cls)
    Exception.__init__(error, message)
    error.context = context
    return error
