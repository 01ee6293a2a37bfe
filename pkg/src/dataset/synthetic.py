"""Synthetic pitching corpus with a planted outcome model.

Each pitch is a right-handed pitching template evaluated on a time axis in
seconds, with release at 1.0 s inside the 1.2 s analysis window:

  - foot paths are cubic splines through fixed keyframes,
  - pelvis drive, hip opening, trunk rotation and the throwing-arm arc are
    Gaussian-CDF transitions; the arm arc is the sharpest, so the throwing
    wrist is fastest at release.

Pitchers differ in morphology (segment scale), ability (drive and trunk
rotation amplitude, shifted by competitive level) and an efficiency offset
that changes ball speed without touching the kinematics. Pitches differ by
amplitude jitter, tempo (time warp about release) and marker noise.

Ball speed is planted as

    base + hip_coef * f1 + trunk_coef * f2 + offset + noise

with `planted_features` f1 (peak forward speed of the pivot hip over the
first 30% of normalized frames) and f2 (peak horizontal angular rate of the
shoulder line over the last 30%), both measured on the noise-free motion.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator
from scipy.interpolate import CubicSpline
from scipy.special import ndtr

from src.common.errors import CorpusError
from src.common.persistence import write_csv, write_json
from src.dataset.corpus import FORMAT_VERSION, MANIFEST_NAME, pitch_frame, select_top5
from src.dataset.models import (
    N_FRAMES,
    N_JOINTS,
    SPEED_BAND_MPH,
    CompetitiveLevel,
    Handedness,
    JointId,
    MotionSample,
    PitcherRecord,
    level_group,
)
from src.signal_prep.models import RawMotion
from src.signal_prep.preprocessing import mirror

logger = logging.getLogger(__name__)

RELEASE_S = 1.0
SEGMENT_S = 1.2
PRE_ROLL_S = 0.5
POST_ROLL_S = 0.3
NORMALIZED_DT = SEGMENT_S / (N_FRAMES - 1)

EARLY_FRAMES = slice(0, 31)
LATE_FRAMES = slice(70, N_FRAMES)

DEFAULT_PROPORTIONS: dict[CompetitiveLevel, float] = {
    CompetitiveLevel.HIGH_SCHOOL: 4,
    CompetitiveLevel.COLLEGIATE: 10,
    CompetitiveLevel.INDUSTRIAL: 20,
    CompetitiveLevel.INDEPENDENT: 3,
    CompetitiveLevel.PROFESSIONAL: 13,
}

LEVEL_ABILITY: dict[CompetitiveLevel, float] = {
    CompetitiveLevel.HIGH_SCHOOL: -1.0,
    CompetitiveLevel.COLLEGIATE: -0.5,
    CompetitiveLevel.INDUSTRIAL: 0.3,
    CompetitiveLevel.INDEPENDENT: 0.0,
    CompetitiveLevel.PROFESSIONAL: 0.8,
}


class SynthConfig(BaseModel):
    """Generator settings. Speeds in mph, lengths in meters, times in seconds."""

    n_pitchers: int = Field(default=10, ge=2, description="Number of pitchers")
    pitches_per_pitcher: int = Field(default=5, ge=5, description="Pitches recorded per pitcher")
    level_proportions: dict[CompetitiveLevel, float] = Field(
        default_factory=lambda: dict(DEFAULT_PROPORTIONS)
    )
    left_handed_fraction: float = Field(default=0.2, ge=0, le=1)

    base_speed: float = Field(default=50.0, description="Intercept of the outcome model")
    hip_coef: float = Field(default=10.0, description="mph per m/s of pivot-hip speed")
    trunk_coef: float = Field(default=1.2, description="mph per rad/s of shoulder-line rate")
    expert_offset: float = Field(default=2.0, description="Mean efficiency offset, expert group")
    intermediate_offset: float = Field(
        default=-2.0, description="Mean efficiency offset, intermediate group"
    )
    offset_sd: float = Field(default=1.0, ge=0, description="Per-pitcher offset spread")
    pitch_noise_sd: float = Field(default=0.5, ge=0, description="Per-pitch speed noise")

    ability_sd: float = Field(default=0.5, ge=0)
    morphology_sd: float = Field(default=0.05, ge=0, description="Relative segment-scale spread")
    amplitude_jitter: float = Field(default=0.03, ge=0, description="Per-pitch relative jitter")
    tempo_sd: float = Field(default=0.03, ge=0, le=0.2, description="Per-pitch time-warp spread")
    marker_noise_sd: float = Field(default=0.002, ge=0, description="Position noise (m)")

    sampling_rate: float = Field(default=200.0, gt=50, description="Raw capture rate (Hz)")

    @field_validator("level_proportions")
    @classmethod
    def check_proportions(cls, v: dict[CompetitiveLevel, float]) -> dict[CompetitiveLevel, float]:
        if set(v) != set(CompetitiveLevel):
            raise ValueError("level_proportions needs all five competitive levels")
        if any(p <= 0 for p in v.values()):
            raise ValueError("level proportions must be positive")
        return v


@dataclass(frozen=True)
class _PitcherPlan:
    index: int
    id: str
    level: CompetitiveLevel
    handedness: Handedness
    ability: float
    scale: float
    offset: float
    seed: int


@dataclass(frozen=True)
class _PitchParams:
    drive: float
    trunk_sweep: float
    arm_sweep: float
    tempo: float
    speed_noise: float


@dataclass
class SyntheticRawPitch:
    """A raw synthetic capture with its planted ground truth."""

    pitcher_id: str
    level: CompetitiveLevel
    pitch_index: int
    raw: RawMotion
    ball_speed: float
    release_frame: int


def allocate_levels(n: int, proportions: dict[CompetitiveLevel, float]) -> list[CompetitiveLevel]:
    """Level of each pitcher by largest remainder, at least 2 per level when n >= 10."""
    levels = list(CompetitiveLevel)
    total = sum(proportions[lv] for lv in levels)
    quotas = [proportions[lv] / total * n for lv in levels]
    counts = [int(math.floor(q)) for q in quotas]
    by_remainder = sorted(range(len(levels)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in by_remainder[: n - sum(counts)]:
        counts[i] += 1
    if n >= 2 * len(levels):
        for i in range(len(levels)):
            while counts[i] < 2:
                donor = max(range(len(levels)), key=lambda j: (counts[j], -j))
                counts[donor] -= 1
                counts[i] += 1
    return [lv for lv, c in zip(levels, counts) for _ in range(c)]


def _plan_pitchers(config: SynthConfig, seed: int) -> list[_PitcherPlan]:
    levels = allocate_levels(config.n_pitchers, config.level_proportions)
    order = np.random.default_rng(np.random.SeedSequence([seed])).permutation(len(levels))
    return [
        _plan_pitcher(config, seed, i, levels[int(order[i])]) for i in range(config.n_pitchers)
    ]


def _plan_pitcher(
    config: SynthConfig,
    seed: int,
    index: int,
    level: CompetitiveLevel,
    handedness: Optional[Handedness] = None,
) -> _PitcherPlan:
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    ability = LEVEL_ABILITY[level] + config.ability_sd * rng.standard_normal()
    ability = float(np.clip(ability, -3, 3))
    scale = float(1.0 + config.morphology_sd * np.clip(rng.standard_normal(), -3, 3))
    mean_offset = (
        config.intermediate_offset
        if level_group(level) == "intermediate"
        else config.expert_offset
    )
    offset = float(mean_offset + config.offset_sd * rng.standard_normal())
    left = rng.random() < config.left_handed_fraction
    if handedness is None:
        handedness = Handedness.LEFT if left else Handedness.RIGHT
    return _PitcherPlan(
        index=index,
        id=f"P{index + 1:03d}",
        level=level,
        handedness=handedness,
        ability=ability,
        scale=scale,
        offset=offset,
        seed=seed,
    )


def _pitch_params(config: SynthConfig, plan: _PitcherPlan, k: int) -> _PitchParams:
    rng = np.random.default_rng(np.random.SeedSequence([plan.seed, plan.index, k]))
    z = np.clip(rng.standard_normal(5), -3, 3)
    jitter = config.amplitude_jitter
    return _PitchParams(
        drive=0.40 * plan.scale * (1 + 0.12 * plan.ability) * (1 + jitter * z[0]),
        trunk_sweep=2.0 * (1 + 0.12 * plan.ability) * (1 + jitter * z[1]),
        arm_sweep=2.8 * (1 + jitter * z[2]),
        tempo=config.tempo_sd * z[3],
        speed_noise=config.pitch_noise_sd * z[4],
    )


def _marker_rng(plan: _PitcherPlan, k: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([plan.seed, plan.index, k, 1]))


# Foot keyframes (unit morphology): time (s), then (x, y, z) per key
_PIVOT_FOOT = CubicSpline(
    [-0.8, 0.0, 0.6, 0.9, 1.1, 1.3, 1.8],
    [
        [0.0, 0.05, -0.10],
        [0.0, 0.05, -0.10],
        [0.0, 0.05, -0.10],
        [0.0, 0.05, -0.08],
        [0.02, 0.10, 0.10],
        [0.04, 0.15, 0.35],
        [0.04, 0.10, 0.45],
    ],
    bc_type="clamped",
)
_LEAD_FOOT = CubicSpline(
    [-0.8, 0.0, 0.35, 0.55, 0.75, 0.85, 1.8],
    [
        [0.0, 0.05, 0.10],
        [0.0, 0.05, 0.10],
        [0.0, 0.45, 0.05],
        [0.0, 0.35, 0.30],
        [-0.02, 0.08, 0.75],
        [-0.02, 0.05, 0.85],
        [-0.02, 0.05, 0.85],
    ],
    bc_type="clamped",
)


def _step(t: np.ndarray, center: float, width: float) -> np.ndarray:
    return ndtr((t - center) / width)


def _side(psi: np.ndarray) -> np.ndarray:
    """Unit vector from body centre to the right side for line angle psi."""
    return np.stack([np.cos(psi), np.zeros_like(psi), -np.sin(psi)], axis=-1)


def _arm(theta: np.ndarray) -> np.ndarray:
    return np.stack([np.zeros_like(theta), np.sin(theta), -np.cos(theta)], axis=-1)


def pitch_pose(times: np.ndarray, params: _PitchParams, scale: float) -> np.ndarray:
    """Right-handed joint positions (len(times) x 15 x 3) at `times` seconds."""
    s = scale
    tau = RELEASE_S + (np.asarray(times, dtype=np.float64) - RELEASE_S) * (1.0 + params.tempo)

    z_pelvis = params.drive * _step(tau, 0.20, 0.10) + 0.45 * s * _step(tau, 0.70, 0.12)
    y_pelvis = 0.95 * s - 0.08 * s * _step(tau, 0.75, 0.12)
    pelvis = np.stack([np.zeros_like(tau), y_pelvis, z_pelvis], axis=-1)
    hips = 0.12 * s * _side(np.pi / 2 - 1.4 * _step(tau, 0.85, 0.07))

    lean = 0.25 * s * _step(tau, 0.97, 0.08)
    chest = pelvis + np.stack([np.zeros_like(tau), np.full_like(tau, 0.50 * s), lean], axis=-1)
    psi_shoulder = np.pi / 2 + 0.2 - params.trunk_sweep * _step(tau, 0.93, 0.05)
    shoulders = 0.19 * s * _side(psi_shoulder)

    theta = 0.3 + params.arm_sweep * _step(tau, RELEASE_S, 0.03)

    pose = np.empty((tau.size, N_JOINTS, 3))

    def put(joint: JointId, value: np.ndarray) -> None:
        pose[:, joint.position, :] = value

    forward = np.array([0.0, 0.0, 1.0])
    put(JointId.HEAD, chest + s * np.array([0.0, 0.25, 0.05]) + 0.5 * lean[:, None] * forward)
    put(JointId.R_SHOULDER, chest + shoulders)
    put(JointId.L_SHOULDER, chest - shoulders)
    r_elbow = chest + shoulders + 0.30 * s * _arm(theta)
    put(JointId.R_ELBOW, r_elbow)
    put(JointId.R_WRIST, r_elbow + 0.28 * s * _arm(theta + 0.3))
    l_elbow = chest - shoulders + s * np.array([-0.05, -0.25, 0.12])
    put(JointId.L_ELBOW, l_elbow)
    put(JointId.L_WRIST, l_elbow + s * np.array([0.02, -0.05, 0.22]))

    r_hip = pelvis + hips
    l_hip = pelvis - hips
    put(JointId.R_HIP, r_hip)
    put(JointId.L_HIP, l_hip)

    r_heel = s * _PIVOT_FOOT(tau)
    l_heel = s * _LEAD_FOOT(tau)
    put(JointId.R_HEEL, r_heel)
    put(JointId.L_HEEL, l_heel)
    put(JointId.R_TOE, r_heel + s * np.array([0.15, -0.03, 0.05]))
    put(JointId.L_TOE, l_heel + s * np.array([0.0, -0.03, 0.22]))
    put(JointId.R_KNEE, 0.5 * (r_hip + r_heel) + s * np.array([0.0, 0.0, 0.08]))
    put(JointId.L_KNEE, 0.5 * (l_hip + l_heel) + s * np.array([0.0, 0.05, 0.10]))
    return pose


def planted_features(motion: np.ndarray, dt: float = NORMALIZED_DT) -> tuple[float, float]:
    """(f1, f2) of a right-handed 101-frame motion.

    f1: peak forward (z) velocity of the pivot hip over frames 0-30.
    f2: peak horizontal angular rate of the shoulder line over frames 70-100.
    """
    hip_z = motion[:, JointId.R_HIP.position, 2]
    f1 = float(np.max(np.gradient(hip_z, dt)[EARLY_FRAMES]))

    line = motion[:, JointId.R_SHOULDER.position, :] - motion[:, JointId.L_SHOULDER.position, :]
    angle = np.unwrap(np.arctan2(-line[:, 2], line[:, 0]))
    f2 = float(np.max(np.abs(np.gradient(angle, dt))[LATE_FRAMES]))
    return f1, f2


def _ball_speed(
    config: SynthConfig, plan: _PitcherPlan, params: _PitchParams, clean: np.ndarray
) -> float:
    f1, f2 = planted_features(clean)
    speed = (
        config.base_speed
        + config.hip_coef * f1
        + config.trunk_coef * f2
        + plan.offset
        + params.speed_noise
    )
    lo, hi = SPEED_BAND_MPH
    if not lo < speed < hi:
        raise CorpusError(
            f"synthetic speed {speed:.1f} mph for {plan.id} outside ({lo}, {hi}); "
            "adjust base_speed or coefficients",
            pitcher_id=plan.id,
        )
    return float(speed)


def _normalized_times() -> np.ndarray:
    return np.arange(N_FRAMES) * NORMALIZED_DT


def synthesize_corpus(config: SynthConfig, seed: int) -> list[PitcherRecord]:
    """Normalized synthetic corpus; left-handers are stored already mirrored.

    Raises:
        CorpusError: a planted speed falls outside the sanity band.
    """
    if seed < 0:
        raise CorpusError(f"seed must be non-negative, got {seed}", seed=seed)
    times = _normalized_times()
    records = []
    for plan in _plan_pitchers(config, seed):
        samples = []
        for k in range(config.pitches_per_pitcher):
            params = _pitch_params(config, plan, k)
            clean = pitch_pose(times, params, plan.scale)
            noise = _marker_rng(plan, k).standard_normal(clean.shape)
            noisy = clean + config.marker_noise_sd * noise
            samples.append(
                MotionSample(
                    motion=noisy,
                    ball_speed=_ball_speed(config, plan, params, clean),
                    pitcher_id=plan.id,
                    pitch_index=k,
                )
            )
        records.append(
            PitcherRecord(
                id=plan.id,
                level=plan.level,
                handedness=plan.handedness,
                pitches=select_top5(samples),
                mirrored=plan.handedness == Handedness.LEFT,
            )
        )
    logger.info("Synthesized %d pitchers (seed %d)", len(records), seed)
    return records


def raw_times(fs: float) -> np.ndarray:
    """Sample times (s) of a raw capture: pre-roll, analysis window, post-roll."""
    n = int(round((PRE_ROLL_S + SEGMENT_S + POST_ROLL_S) * fs)) + 1
    return np.arange(n) / fs - PRE_ROLL_S


def planted_release_frame(fs: float) -> int:
    return int(round((PRE_ROLL_S + RELEASE_S) * fs))


def _raw_pitch(config: SynthConfig, plan: _PitcherPlan, k: int) -> SyntheticRawPitch:
    fs = config.sampling_rate
    params = _pitch_params(config, plan, k)
    clean = pitch_pose(_normalized_times(), params, plan.scale)
    frames = pitch_pose(raw_times(fs), params, plan.scale)
    frames = frames + config.marker_noise_sd * _marker_rng(plan, k).standard_normal(frames.shape)
    raw = RawMotion(frames=frames, sampling_rate=fs, handedness=Handedness.RIGHT)
    if plan.handedness == Handedness.LEFT:
        raw = mirror(raw, guard=False)
    return SyntheticRawPitch(
        pitcher_id=plan.id,
        level=plan.level,
        pitch_index=k,
        raw=raw,
        ball_speed=_ball_speed(config, plan, params, clean),
        release_frame=planted_release_frame(fs),
    )


def synthesize_raw_pitch(
    config: SynthConfig,
    seed: int,
    handedness: Handedness = Handedness.RIGHT,
    level: CompetitiveLevel = CompetitiveLevel.COLLEGIATE,
) -> SyntheticRawPitch:
    """One raw capture of a single seeded pitcher."""
    plan = _plan_pitcher(config, seed, 0, level, handedness)
    return _raw_pitch(config, plan, 0)


def synthesize_raw_corpus(config: SynthConfig, seed: int) -> list[list[SyntheticRawPitch]]:
    """Raw captures of every pitch, grouped by pitcher (same draws as `synthesize_corpus`)."""
    return [
        [_raw_pitch(config, plan, k) for k in range(config.pitches_per_pitcher)]
        for plan in _plan_pitchers(config, seed)
    ]


def write_raw_corpus(config: SynthConfig, seed: int, out_dir: Path) -> Path:
    """Write a raw synthetic corpus (manifest kind "raw") for the `prep` command."""
    out_dir = Path(out_dir)
    entries = []
    for pitches in synthesize_raw_corpus(config, seed):
        first = pitches[0]
        files = []
        for p in pitches:
            rel = f"{p.pitcher_id}/raw_{p.pitch_index:02d}.csv"
            write_csv(out_dir / rel, pitch_frame(p.raw.frames), float_format="%.17g")
            files.append(
                {"file": rel, "ball_speed": p.ball_speed, "sampling_rate": p.raw.sampling_rate}
            )
        entries.append(
            {
                "id": first.pitcher_id,
                "level": first.level.value,
                "handedness": first.raw.handedness.value,
                "mirrored": False,
                "pitches": files,
            }
        )
    manifest_path = out_dir / MANIFEST_NAME
    write_json(
        manifest_path, {"format_version": FORMAT_VERSION, "kind": "raw", "pitchers": entries}
    )
    logger.info("Wrote raw synthetic corpus of %d pitchers to %s", len(entries), out_dir)
    return manifest_path
