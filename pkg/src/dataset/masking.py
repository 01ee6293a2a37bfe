"""Region and time-window restriction of motion samples."""

import numpy as np

from src.dataset.models import MotionSample, PitcherRecord, RegionMask, WindowSpec


def restrict_array(
    motion: np.ndarray,
    joints: tuple,
    region: RegionMask,
    window: WindowSpec,
) -> np.ndarray:
    """Leading window frames of the region's joints; channels are dropped, never zeroed."""
    missing = [j.value for j in region.joints if j not in joints]
    if missing:
        raise ValueError(f"sample lacks joints {missing} of region {region.name.value}")
    idx = [joints.index(j) for j in region.joints]
    return motion[window.frame_slice][:, idx, :].copy()


def restrict(sample: MotionSample, region: RegionMask, window: WindowSpec) -> MotionSample:
    """Sample reduced to `region` joints and the first frames of `window`."""
    return sample.model_copy(
        update={
            "motion": restrict_array(sample.motion, sample.joints, region, window),
            "joints": region.joints,
        }
    )


def restrict_corpus(
    records: list[PitcherRecord], region: RegionMask, window: WindowSpec
) -> list[PitcherRecord]:
    return [
        r.model_copy(update={"pitches": [restrict(p, region, window) for p in r.pitches]})
        for r in records
    ]
