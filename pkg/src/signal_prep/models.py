"""Raw and normalized motion captures."""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.dataset.models import JOINT_ORDER, N_COORDS, N_FRAMES, Handedness, JointId


def _as_motion_array(v: Any) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != N_COORDS:
        raise ValueError(f"frames must be frames x joints x 3, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("frames contain non-finite positions")
    return arr


class RawMotion(BaseModel):
    """Variable-rate capture of one pitch (positions in meters)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    frames: np.ndarray = Field(description="Joint positions, frames x joints x 3")
    sampling_rate: float = Field(gt=0, description="Capture rate (Hz)")
    handedness: Handedness = Field(description="Throwing hand")
    joints: tuple[JointId, ...] = Field(
        default=tuple(JOINT_ORDER), description="Joint labels of the joint axis"
    )

    @field_validator("frames", mode="before")
    @classmethod
    def validate_frames(cls, v: Any) -> np.ndarray:
        arr = _as_motion_array(v)
        if arr.shape[0] < 2:
            raise ValueError(f"need at least 2 frames, got {arr.shape[0]}")
        return arr

    @model_validator(mode="after")
    def check_joint_axis(self) -> "RawMotion":
        if self.frames.shape[1] != len(self.joints):
            raise ValueError(
                f"joint axis has {self.frames.shape[1]} entries but {len(self.joints)} labels"
            )
        return self

    @property
    def n_frames(self) -> int:
        return int(self.frames.shape[0])

    @property
    def duration(self) -> float:
        """Seconds between the first and last frame."""
        return (self.n_frames - 1) / self.sampling_rate

    def joint_index(self, joint: JointId) -> int:
        return self.joints.index(joint)


class NormalizedMotion(BaseModel):
    """A pitch resampled onto 101 frames of normalized time."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray = Field(description="Positions, 101 frames x joints x 3")
    release_fraction: float = Field(ge=0.0, le=1.0, description="Release position in [0, 1]")
    handedness: Handedness = Field(default=Handedness.RIGHT, description="Throwing hand")
    joints: tuple[JointId, ...] = Field(default=tuple(JOINT_ORDER))

    @field_validator("matrix", mode="before")
    @classmethod
    def validate_matrix(cls, v: Any) -> np.ndarray:
        arr = _as_motion_array(v)
        if arr.shape[0] != N_FRAMES:
            raise ValueError(f"normalized motion needs {N_FRAMES} frames, got {arr.shape[0]}")
        return arr
