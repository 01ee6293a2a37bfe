"""Corpus files: JSON manifest plus one CSV per pitch.

Manifest layout (`manifest.json`)::

    {
      "format_version": 1,
      "kind": "normalized" | "raw",
      "pitchers": [
        {"id": "P001", "level": "collegiate", "handedness": "left", "mirrored": true,
         "pitches": [{"file": "P001/pitch_00.csv", "ball_speed": 84.2,
                      "sampling_rate": 200.0}]}
      ]
    }

`file` is relative to the manifest directory; `sampling_rate` is required for
raw captures only. `mirrored` marks normalized motion already reflected to
right-handed orientation.

Pitch CSV: a mandatory header `frame,head_x,head_y,head_z,l_shoulder_x,...`
(joint-major in `JointId` order, then x/y/z), one row per frame, frames
numbered from 0. Normalized pitches have exactly 101 rows. Values are
written with 17 significant digits so a write/load round trip is exact.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError, field_validator

from src.common.errors import CorpusError, PitchBenchError
from src.common.persistence import read_json, write_csv, write_json
from src.dataset.models import (
    JOINT_ORDER,
    N_COORDS,
    N_FRAMES,
    N_JOINTS,
    CompetitiveLevel,
    Handedness,
    MotionSample,
    PitcherRecord,
)
from src.signal_prep.models import NormalizedMotion, RawMotion
from src.signal_prep.preprocessing import (
    POST_RELEASE_S,
    PRE_RELEASE_S,
    PrepOptions,
    PreprocessLog,
    mirror,
    preprocess_pitch,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"
PITCHES_PER_PITCHER = 5

COORD_COLUMNS: list[str] = [f"{j.value}_{axis}" for j in JOINT_ORDER for axis in "xyz"]
CSV_COLUMNS: list[str] = ["frame", *COORD_COLUMNS]


class PitchEntry(BaseModel):
    file: str = Field(min_length=1, description="CSV path relative to the manifest")
    ball_speed: float = Field(description="Ball speed (mph)")
    sampling_rate: Optional[float] = Field(default=None, gt=0, description="Raw capture rate (Hz)")


class PitcherEntry(BaseModel):
    id: str = Field(min_length=1)
    level: CompetitiveLevel
    handedness: Handedness
    mirrored: bool = False
    pitches: list[PitchEntry]


class CorpusManifest(BaseModel):
    format_version: int = Field(default=FORMAT_VERSION)
    kind: Literal["normalized", "raw"] = "normalized"
    pitchers: list[PitcherEntry]

    @field_validator("format_version")
    @classmethod
    def check_version(cls, v: int) -> int:
        if v != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {v} (expected {FORMAT_VERSION})")
        return v


class LoaderConfig(BaseModel):
    """Coordinate conventions of the source data and preparation options."""

    axis_order: tuple[int, int, int] = Field(
        default=(0, 1, 2), description="Source column feeding lateral, vertical, forward axes"
    )
    axis_sign: tuple[float, float, float] = Field(default=(1.0, 1.0, 1.0))
    unit_scale: float = Field(default=1.0, gt=0, description="Multiplier to meters")
    select_top: bool = Field(default=True, description="Keep the five fastest pitches")
    prep: PrepOptions = Field(default_factory=PrepOptions)

    @field_validator("axis_order")
    @classmethod
    def check_permutation(cls, v: tuple[int, int, int]) -> tuple[int, int, int]:
        if sorted(v) != [0, 1, 2]:
            raise ValueError(f"axis_order must be a permutation of (0, 1, 2), got {v}")
        return v

    @field_validator("axis_sign")
    @classmethod
    def check_signs(cls, v: tuple[float, float, float]) -> tuple[float, float, float]:
        if any(s not in (1.0, -1.0) for s in v):
            raise ValueError(f"axis_sign entries must be +1 or -1, got {v}")
        return v

    def apply(self, frames: np.ndarray) -> np.ndarray:
        identity = self.axis_order == (0, 1, 2) and self.axis_sign == (1.0, 1.0, 1.0)
        if identity and self.unit_scale == 1.0:
            return frames
        return frames[..., list(self.axis_order)] * np.asarray(self.axis_sign) * self.unit_scale


@dataclass
class CorpusLoad:
    """Loaded records together with per-pitch preparation logs and errors."""

    records: list[PitcherRecord] = field(default_factory=list)
    logs: dict[str, PreprocessLog] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)


def select_top5(pitches: list[MotionSample], keep: int = PITCHES_PER_PITCHER) -> list[MotionSample]:
    """The `keep` fastest pitches, fastest first; ties keep the earlier recording.

    Raises:
        CorpusError: fewer than `keep` pitches.
    """
    if len(pitches) < keep:
        pitcher = pitches[0].pitcher_id if pitches else None
        raise CorpusError(
            f"need at least {keep} pitches, got {len(pitches)}", pitcher_id=pitcher
        )
    order = sorted(range(len(pitches)), key=lambda i: (-pitches[i].ball_speed, i))
    return [pitches[i] for i in order[:keep]]


def read_manifest(path: Path) -> CorpusManifest:
    """Parse and validate a corpus manifest.

    Raises:
        CorpusError: missing, malformed or empty manifest; the message carries
            the field location.
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"manifest not found: {path}", path=str(path))
    try:
        raw = read_json(path)
    except ValueError as e:
        raise CorpusError(f"{path}: invalid JSON ({e})", path=str(path)) from e
    try:
        manifest = CorpusManifest.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        loc = ".".join(str(p) for p in first["loc"])
        raise CorpusError(f"{path}: {loc}: {first['msg']}", path=str(path), location=loc) from e
    if not manifest.pitchers:
        raise CorpusError(f"{path}: manifest lists no pitchers", path=str(path))

    ids = [p.id for p in manifest.pitchers]
    duplicates = sorted({i for i in ids if ids.count(i) > 1})
    if duplicates:
        raise CorpusError(f"{path}: duplicate pitcher ids {duplicates}", duplicates=duplicates)
    return manifest


def read_pitch_csv(path: Path, expected_frames: Optional[int] = None) -> np.ndarray:
    """Read one pitch CSV into a frames x 15 x 3 array.

    Raises:
        CorpusError: wrong header, frame numbering, row count or a
            non-numeric/non-finite cell (reported as line and column).
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"pitch file not found: {path}", path=str(path))
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise CorpusError(f"{path}: unreadable CSV ({e})", path=str(path)) from e

    if list(df.columns) != CSV_COLUMNS:
        missing = [c for c in CSV_COLUMNS if c not in df.columns]
        raise CorpusError(
            f"{path}: header does not match the pitch layout (missing {missing[:3]})",
            path=str(path),
            line=1,
        )
    values = df.apply(pd.to_numeric, errors="coerce")
    bad = ~np.isfinite(values.to_numpy(dtype=np.float64, na_value=np.nan))
    if bad.any():
        row, col = (int(i) for i in np.argwhere(bad)[0])
        raise CorpusError(
            f"{path}: line {row + 2}, column {CSV_COLUMNS[col]}: not a finite number",
            path=str(path),
            line=row + 2,
            column=CSV_COLUMNS[col],
        )
    frames = values["frame"].to_numpy()
    if not np.array_equal(frames, np.arange(len(df))):
        raise CorpusError(f"{path}: frame column must count 0..{len(df) - 1}", path=str(path))
    if expected_frames is not None and len(df) != expected_frames:
        raise CorpusError(
            f"{path}: expected {expected_frames} frames, got {len(df)}", path=str(path)
        )
    coords = values[COORD_COLUMNS].to_numpy(dtype=np.float64)
    return coords.reshape(len(df), N_JOINTS, N_COORDS)


def pitch_frame(motion: np.ndarray) -> pd.DataFrame:
    """Pitch CSV layout of a frames x 15 x 3 array."""
    n = motion.shape[0]
    df = pd.DataFrame(motion.reshape(n, N_JOINTS * N_COORDS), columns=COORD_COLUMNS)
    df.insert(0, "frame", np.arange(n))
    return df


def prepare_corpus(manifest_path: Path, config: Optional[LoaderConfig] = None) -> CorpusLoad:
    """Load every pitch, preparing raw captures, and collect per-file errors.

    Pitchers whose pitches fail are left out of `records`; their errors are
    keyed by pitch file in `errors`.
    """
    config = config or LoaderConfig()
    manifest_path = Path(manifest_path)
    manifest = read_manifest(manifest_path)
    base = manifest_path.parent
    result = CorpusLoad()

    short = [p.id for p in manifest.pitchers if len(p.pitches) < PITCHES_PER_PITCHER]
    if short:
        raise CorpusError(
            f"pitchers with fewer than {PITCHES_PER_PITCHER} pitches: {short}", pitchers=short
        )

    for entry in manifest.pitchers:
        samples: list[MotionSample] = []
        failed = False
        for k, pitch in enumerate(entry.pitches):
            try:
                motion, log = _load_pitch(base, manifest.kind, entry, pitch, config)
                if log is not None:
                    result.logs[pitch.file] = log
                samples.append(
                    MotionSample(
                        motion=motion,
                        ball_speed=pitch.ball_speed,
                        pitcher_id=entry.id,
                        pitch_index=k,
                    )
                )
            except (PitchBenchError, ValidationError) as e:
                message = _describe(e)
                logger.error("Pitcher %s, %s: %s", entry.id, pitch.file, message)
                result.errors[pitch.file] = message
                failed = True
        if failed:
            continue

        if config.select_top:
            samples = select_top5(samples)
        result.records.append(
            PitcherRecord(
                id=entry.id,
                level=entry.level,
                handedness=entry.handedness,
                pitches=samples,
                mirrored=entry.handedness == Handedness.LEFT,
            )
        )

    logger.info(
        "Loaded %d pitchers (%d samples) from %s, %d pitch errors",
        len(result.records),
        sum(len(r.pitches) for r in result.records),
        manifest_path,
        len(result.errors),
    )
    return result


def load_corpus(manifest_path: Path, config: Optional[LoaderConfig] = None) -> list[PitcherRecord]:
    """Fully prepared records with five pitches each.

    Raises:
        CorpusError: malformed files or pitch counts; every failing pitch file
            is listed.
    """
    loaded = prepare_corpus(manifest_path, config)
    if loaded.errors:
        listing = "; ".join(f"{f}: {m}" for f, m in sorted(loaded.errors.items()))
        raise CorpusError(
            f"{len(loaded.errors)} pitch file(s) failed: {listing}", files=sorted(loaded.errors)
        )
    return loaded.records


def _load_pitch(
    base: Path,
    kind: str,
    entry: PitcherEntry,
    pitch: PitchEntry,
    config: LoaderConfig,
) -> tuple[np.ndarray, Optional[PreprocessLog]]:
    path = base / pitch.file
    if kind == "normalized":
        frames = config.apply(read_pitch_csv(path, expected_frames=N_FRAMES))
        if entry.handedness == Handedness.LEFT and not entry.mirrored:
            normalized = NormalizedMotion(
                matrix=frames,
                release_fraction=PRE_RELEASE_S / (PRE_RELEASE_S + POST_RELEASE_S),
                handedness=entry.handedness,
            )
            frames = mirror(normalized, lateral_axis=config.prep.lateral_axis).matrix
        return frames, None

    if pitch.sampling_rate is None:
        raise CorpusError(f"{pitch.file}: raw pitch needs sampling_rate", path=pitch.file)
    raw = RawMotion(
        frames=config.apply(read_pitch_csv(path)),
        sampling_rate=pitch.sampling_rate,
        handedness=entry.handedness,
    )
    normalized, log = preprocess_pitch(raw, config.prep)
    return normalized.matrix, log


def _describe(e: Exception) -> str:
    if isinstance(e, ValidationError):
        first = e.errors()[0]
        return f"{'.'.join(str(p) for p in first['loc'])}: {first['msg']}"
    return str(e)


def write_corpus(records: list[PitcherRecord], out_dir: Path) -> Path:
    """Write normalized records as a manifest plus pitch CSVs.

    Returns:
        Path of the written manifest.
    """
    out_dir = Path(out_dir)
    entries = []
    for record in records:
        pitches = []
        for sample in record.pitches:
            rel = f"{record.id}/pitch_{sample.pitch_index:02d}.csv"
            write_csv(out_dir / rel, pitch_frame(sample.motion), float_format="%.17g")
            pitches.append({"file": rel, "ball_speed": sample.ball_speed})
        entries.append(
            {
                "id": record.id,
                "level": record.level.value,
                "handedness": record.handedness.value,
                "mirrored": record.mirrored or record.handedness == Handedness.LEFT,
                "pitches": pitches,
            }
        )
    manifest_path = out_dir / MANIFEST_NAME
    write_json(
        manifest_path,
        {"format_version": FORMAT_VERSION, "kind": "normalized", "pitchers": entries},
    )
    logger.info("Wrote corpus of %d pitchers to %s", len(records), out_dir)
    return manifest_path
