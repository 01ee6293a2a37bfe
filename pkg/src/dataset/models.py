"""Pydantic models and enumerations for the pitching corpus.

The order of `JointId` members defines the joint axis of every motion
tensor; `REGION_JOINTS` defines the body regions used for restriction.
"""

from enum import Enum
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator

N_FRAMES = 101
N_JOINTS = 15
N_COORDS = 3
N_WINDOWS = 10
FRAMES_PER_WINDOW = 10

SPEED_BAND_MPH = (40.0, 110.0)


class JointId(str, Enum):
    """The 15 anatomical landmarks, in tensor layout order."""

    HEAD = "head"
    L_SHOULDER = "l_shoulder"
    R_SHOULDER = "r_shoulder"
    L_ELBOW = "l_elbow"
    R_ELBOW = "r_elbow"
    L_WRIST = "l_wrist"
    R_WRIST = "r_wrist"
    L_HIP = "l_hip"
    R_HIP = "r_hip"
    L_KNEE = "l_knee"
    R_KNEE = "r_knee"
    L_HEEL = "l_heel"
    R_HEEL = "r_heel"
    L_TOE = "l_toe"
    R_TOE = "r_toe"

    @property
    def position(self) -> int:
        """Index on the joint axis."""
        return JOINT_ORDER.index(self)

    @property
    def mirrored(self) -> "JointId":
        """Same landmark on the opposite body side (head maps to itself)."""
        if self.value.startswith("l_"):
            return JointId("r_" + self.value[2:])
        if self.value.startswith("r_"):
            return JointId("l_" + self.value[2:])
        return self


JOINT_ORDER: list[JointId] = list(JointId)

# Source index for each destination joint after a left/right label swap
MIRROR_PERMUTATION: list[int] = [JOINT_ORDER.index(j.mirrored) for j in JOINT_ORDER]


class Handedness(str, Enum):
    """Throwing hand."""

    LEFT = "left"
    RIGHT = "right"


class CompetitiveLevel(str, Enum):
    """Competition level of a pitcher."""

    HIGH_SCHOOL = "high_school"
    COLLEGIATE = "collegiate"
    INDUSTRIAL = "industrial"
    INDEPENDENT = "independent"
    PROFESSIONAL = "professional"


class Region(str, Enum):
    """Body regions used by the spatiotemporal ablation."""

    THROWING_ARM = "throwing_arm"
    LEADING_ARM = "leading_arm"
    TRUNK = "trunk"
    PIVOT_LEG = "pivot_leg"
    LEADING_LEG = "leading_leg"
    WHOLE_BODY = "whole_body"


REGION_JOINTS: dict[Region, tuple[JointId, ...]] = {
    Region.THROWING_ARM: (JointId.R_SHOULDER, JointId.R_ELBOW, JointId.R_WRIST),
    Region.LEADING_ARM: (JointId.L_SHOULDER, JointId.L_ELBOW, JointId.L_WRIST),
    Region.TRUNK: (
        JointId.HEAD,
        JointId.L_SHOULDER,
        JointId.R_SHOULDER,
        JointId.L_HIP,
        JointId.R_HIP,
    ),
    Region.PIVOT_LEG: (JointId.R_HIP, JointId.R_KNEE, JointId.R_HEEL, JointId.R_TOE),
    Region.LEADING_LEG: (JointId.L_HIP, JointId.L_KNEE, JointId.L_HEEL, JointId.L_TOE),
    Region.WHOLE_BODY: tuple(JOINT_ORDER),
}

ABLATION_REGIONS: list[Region] = [
    Region.THROWING_ARM,
    Region.LEADING_ARM,
    Region.TRUNK,
    Region.PIVOT_LEG,
    Region.LEADING_LEG,
]


class RegionMask(BaseModel):
    """A named subset of joints, kept in tensor layout order."""

    model_config = ConfigDict(frozen=True)

    name: Region = Field(description="Region name")
    joints: tuple[JointId, ...] = Field(description="Joints in the region")

    @classmethod
    def of(cls, region: Region) -> "RegionMask":
        return cls(name=region, joints=REGION_JOINTS[region])

    @field_validator("joints")
    @classmethod
    def sort_joints(cls, v: tuple[JointId, ...]) -> tuple[JointId, ...]:
        """Reorder to tensor layout order and reject empty or repeated joints."""
        if not v:
            raise ValueError("a region needs at least one joint")
        if len(set(v)) != len(v):
            raise ValueError("joints must be unique")
        return tuple(sorted(v, key=JOINT_ORDER.index))

    @property
    def indices(self) -> list[int]:
        return [JOINT_ORDER.index(j) for j in self.joints]


class WindowSpec(BaseModel):
    """Cumulative time window: window w keeps frames 0..10w-1; w=10 keeps all 101."""

    model_config = ConfigDict(frozen=True)

    index: int = Field(ge=1, le=N_WINDOWS, description="Window index w in 1..10")

    @property
    def n_frames(self) -> int:
        if self.index == N_WINDOWS:
            return N_FRAMES
        return FRAMES_PER_WINDOW * self.index

    @property
    def frame_slice(self) -> slice:
        return slice(0, self.n_frames)


def all_windows() -> list[WindowSpec]:
    return [WindowSpec(index=w) for w in range(1, N_WINDOWS + 1)]


class MotionSample(BaseModel):
    """One pitch: motion tensor (frames x joints x 3), ball speed and pitcher id."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    motion: np.ndarray = Field(description="Motion tensor, frames x joints x 3")
    ball_speed: float = Field(description="Measured ball speed (mph)")
    pitcher_id: str = Field(description="Pitcher identity")
    pitch_index: int = Field(default=0, ge=0, description="Recording order within the pitcher")
    joints: tuple[JointId, ...] = Field(
        default=tuple(JOINT_ORDER), description="Joints present on the joint axis"
    )

    @field_validator("motion", mode="before")
    @classmethod
    def validate_motion(cls, v: Any) -> np.ndarray:
        arr = np.asarray(v, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != N_COORDS:
            raise ValueError(f"motion must be frames x joints x 3, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("motion contains non-finite values")
        return arr

    @field_validator("ball_speed")
    @classmethod
    def validate_speed(cls, v: float) -> float:
        lo, hi = SPEED_BAND_MPH
        if not lo < v < hi:
            raise ValueError(f"ball_speed {v} mph outside sanity band ({lo}, {hi})")
        return v

    @property
    def n_frames(self) -> int:
        return int(self.motion.shape[0])

    @property
    def n_joints(self) -> int:
        return int(self.motion.shape[1])


class PitcherRecord(BaseModel):
    """A pitcher with competitive level, handedness and pitches."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    id: str = Field(min_length=1, description="Opaque pitcher identifier")
    level: CompetitiveLevel = Field(description="Competitive level")
    handedness: Handedness = Field(description="Throwing hand as recorded")
    pitches: list[MotionSample] = Field(description="Pitches (5 after top-5 selection)")
    mirrored: bool = Field(default=False, description="Motion was mirrored to right-handed")

    @field_validator("pitches")
    @classmethod
    def validate_ownership(cls, v: list[MotionSample], info: Any) -> list[MotionSample]:
        pitcher_id = info.data.get("id")
        foreign = [p.pitcher_id for p in v if p.pitcher_id != pitcher_id]
        if foreign:
            raise ValueError(f"pitches belong to other pitchers: {sorted(set(foreign))}")
        return v

    @computed_field
    @property
    def mean_speed(self) -> float:
        """Mean ball speed over the pitcher's pitches (mph)."""
        return float(np.mean([p.ball_speed for p in self.pitches]))


class PitcherSummary(BaseModel):
    """Level and mean speed of a pitcher, the input of the grouping search."""

    id: str
    level: CompetitiveLevel
    mean_speed: float


def summarize(records: list[PitcherRecord]) -> list[PitcherSummary]:
    return [PitcherSummary(id=r.id, level=r.level, mean_speed=r.mean_speed) for r in records]


def find_record(records: list[PitcherRecord], pitcher_id: str) -> Optional[PitcherRecord]:
    for r in records:
        if r.id == pitcher_id:
            return r
    return None


INTERMEDIATE_LEVELS: frozenset[CompetitiveLevel] = frozenset(
    {CompetitiveLevel.HIGH_SCHOOL, CompetitiveLevel.COLLEGIATE}
)


def level_group(
    level: CompetitiveLevel,
    intermediate: frozenset[CompetitiveLevel] = INTERMEDIATE_LEVELS,
) -> str:
    """'intermediate' or 'expert' under a grouping of the five levels."""
    return "intermediate" if level in intermediate else "expert"
