"""Per-pitch preparation: release detection, segmentation, time normalization, mirroring.

`preprocess_pitch` chains the steps in a fixed order:

    cutoff (throwing-wrist speed) -> filter -> release -> segment -> normalize -> mirror

Every step is a pure function of its inputs.
"""

import logging
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from src.common.errors import SignalError
from src.dataset.models import N_FRAMES, Handedness, JointId
from src.signal_prep.filtering import CutoffConfig, butterworth_lowpass, optimal_cutoff
from src.signal_prep.models import NormalizedMotion, RawMotion

logger = logging.getLogger(__name__)

PRE_RELEASE_S = 1.0
POST_RELEASE_S = 0.2

# Relative tolerance for treating two wrist speeds as a tie
_TIE_RTOL = 1e-12


class PrepOptions(BaseModel):
    """Options of the preparation pipeline."""

    cutoff: CutoffConfig = Field(default_factory=CutoffConfig)
    fixed_cutoff: Optional[float] = Field(
        default=None, gt=0, description="Skip residual analysis and filter at this cutoff (Hz)"
    )
    pre_release_s: float = Field(default=PRE_RELEASE_S, gt=0)
    post_release_s: float = Field(default=POST_RELEASE_S, ge=0)
    lateral_axis: int = Field(default=0, ge=0, le=2, description="Coordinate negated by mirroring")


class PreprocessLog(BaseModel):
    """What the pipeline decided for one pitch."""

    sampling_rate: float
    n_input_frames: int
    cutoff: float = Field(description="Low-pass cutoff applied (Hz)")
    noise_floor: Optional[float] = None
    release_frame: int = Field(description="Release index in the raw recording")
    release_fraction: float
    segment_frames: int
    mirrored: bool
    warnings: list[str] = Field(default_factory=list)


def throwing_wrist(handedness: Handedness) -> JointId:
    return JointId.R_WRIST if handedness == Handedness.RIGHT else JointId.L_WRIST


def joint_speed(frames: np.ndarray, joint_index: int, fs: float) -> np.ndarray:
    """Speed of one joint: norm of the central-difference velocity, one-sided at the ends."""
    velocity = np.gradient(frames[:, joint_index, :], 1.0 / fs, axis=0)
    return np.linalg.norm(velocity, axis=1)


def detect_release(motion: RawMotion, joint: Optional[JointId] = None) -> int:
    """Frame of maximum throwing-wrist speed.

    Ties within a relative 1e-12 go to the earliest frame, interior frames
    first; the boundary frames only use one-sided differences.

    Raises:
        SignalError: wrist missing, fewer than 3 frames, or a motionless wrist.
    """
    joint = joint or throwing_wrist(motion.handedness)
    if joint not in motion.joints:
        raise SignalError(f"release detection needs joint {joint.value}", joint=joint.value)
    if motion.n_frames < 3:
        raise SignalError(
            f"release detection needs at least 3 frames, got {motion.n_frames}",
            n_frames=motion.n_frames,
        )
    j = motion.joint_index(joint)
    if np.all(motion.frames[:, j, :] == motion.frames[0, j, :]):
        raise SignalError(f"{joint.value} never moves; no detectable release", joint=joint.value)

    speed = joint_speed(motion.frames, j, motion.sampling_rate)
    peak = speed.max()
    tied = np.flatnonzero(speed >= peak * (1.0 - _TIE_RTOL))
    interior = tied[(tied > 0) & (tied < speed.size - 1)]
    return int(interior[0] if interior.size else tied[0])


def segment_bounds(
    fs: float, pre_s: float = PRE_RELEASE_S, post_s: float = POST_RELEASE_S
) -> tuple[int, int]:
    """Frames kept before and after release."""
    return int(round(pre_s * fs)), int(round(post_s * fs))


def extract_segment(
    motion: RawMotion,
    release: int,
    pre_s: float = PRE_RELEASE_S,
    post_s: float = POST_RELEASE_S,
) -> RawMotion:
    """Frames from `pre_s` before to `post_s` after `release`, inclusive.

    Raises:
        SignalError: the recording does not cover the window; the message
            names the missing duration.
    """
    fs = motion.sampling_rate
    n_pre, n_post = segment_bounds(fs, pre_s, post_s)
    start = release - n_pre
    stop = release + n_post
    if start < 0:
        missing = -start / fs
        raise SignalError(
            f"recording starts {missing:.3f} s too late: release at frame {release} "
            f"needs {n_pre} prior frames",
            missing_seconds=missing,
            side="pre",
        )
    if stop > motion.n_frames - 1:
        missing = (stop - (motion.n_frames - 1)) / fs
        raise SignalError(
            f"recording ends {missing:.3f} s too early: release at frame {release} "
            f"needs {n_post} following frames",
            missing_seconds=missing,
            side="post",
        )
    return motion.model_copy(update={"frames": motion.frames[start : stop + 1].copy()})


def resample_frames(frames: np.ndarray, target: int) -> np.ndarray:
    """Linear interpolation onto `target` evenly spaced points of normalized time.

    Endpoints are reproduced exactly.
    """
    n = frames.shape[0]
    src = np.arange(n) / (n - 1)
    dst = np.arange(target) / (target - 1)
    flat = frames.reshape(n, -1)
    out = np.empty((target, flat.shape[1]))
    for c in range(flat.shape[1]):
        out[:, c] = np.interp(dst, src, flat[:, c])
    return out.reshape((target,) + frames.shape[1:])


def time_normalize(
    segment: RawMotion,
    target: int = N_FRAMES,
    release_fraction: Optional[float] = None,
) -> NormalizedMotion:
    """Resample a segment onto `target` frames spanning its duration.

    `release_fraction` defaults to the position implied by the standard
    1.0 s / 0.2 s segment.
    """
    if target != N_FRAMES:
        raise SignalError(f"normalized motion has {N_FRAMES} frames, got target={target}")
    if release_fraction is None:
        n_pre, n_post = segment_bounds(segment.sampling_rate)
        release_fraction = n_pre / (n_pre + n_post)
    return NormalizedMotion(
        matrix=resample_frames(segment.frames, target),
        release_fraction=release_fraction,
        handedness=segment.handedness,
        joints=segment.joints,
    )


Motion = Union[RawMotion, NormalizedMotion]


def mirror(motion: Motion, lateral_axis: int = 0, guard: bool = True) -> Motion:
    """Reflect a capture across the sagittal plane.

    The lateral coordinate is negated and left/right joint labels swap, so a
    left-handed pitch reads as a right-handed one.

    Raises:
        SignalError: `guard` is on and the motion is not left-handed.
    """
    if guard and motion.handedness != Handedness.LEFT:
        raise SignalError(
            "mirror applies to left-handed motion only", handedness=motion.handedness.value
        )

    joints = motion.joints
    try:
        source = [joints.index(j.mirrored) for j in joints]
    except ValueError:
        raise SignalError("mirror needs both sides of every paired joint") from None

    data = motion.frames if isinstance(motion, RawMotion) else motion.matrix
    flipped = data[:, source, :].copy()
    flipped[:, :, lateral_axis] *= -1.0
    hand = Handedness.RIGHT if motion.handedness == Handedness.LEFT else Handedness.LEFT
    key = "frames" if isinstance(motion, RawMotion) else "matrix"
    return motion.model_copy(update={key: flipped, "handedness": hand})


def preprocess_pitch(
    raw: RawMotion,
    options: Optional[PrepOptions] = None,
) -> tuple[NormalizedMotion, PreprocessLog]:
    """Filter, segment around release, normalize to 101 frames and mirror left-handers.

    One cutoff is chosen per pitch from the raw throwing-wrist speed and then
    applied to every joint coordinate.
    """
    options = options or PrepOptions()
    fs = raw.sampling_rate
    warnings: list[str] = []

    noise_floor = None
    if options.fixed_cutoff is not None:
        cutoff = options.fixed_cutoff
    else:
        wrist = raw.joint_index(throwing_wrist(raw.handedness))
        selection = optimal_cutoff(joint_speed(raw.frames, wrist, fs), fs, options.cutoff)
        cutoff = selection.cutoff
        noise_floor = selection.noise_floor
        if selection.warning:
            warnings.append(selection.warning)

    smoothed = butterworth_lowpass(raw.frames, fs, cutoff, axis=0)
    filtered = raw.model_copy(update={"frames": smoothed})
    release = detect_release(filtered)
    segment = extract_segment(filtered, release, options.pre_release_s, options.post_release_s)
    n_pre, n_post = segment_bounds(fs, options.pre_release_s, options.post_release_s)
    fraction = n_pre / (n_pre + n_post)
    normalized = time_normalize(segment, N_FRAMES, fraction)

    mirrored = raw.handedness == Handedness.LEFT
    if mirrored:
        normalized = mirror(normalized, lateral_axis=options.lateral_axis)

    log = PreprocessLog(
        sampling_rate=fs,
        n_input_frames=raw.n_frames,
        cutoff=cutoff,
        noise_floor=noise_floor,
        release_frame=release,
        release_fraction=fraction,
        segment_frames=segment.n_frames,
        mirrored=mirrored,
        warnings=warnings,
    )
    logger.debug(
        "Prepared pitch: fs=%.0f cutoff=%.1f release=%d mirrored=%s", fs, cutoff, release, mirrored
    )
    return normalized, log
