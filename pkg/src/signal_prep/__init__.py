"""Raw motion capture to the fixed 101 x 15 x 3 representation."""

from src.signal_prep.filtering import (
    CutoffConfig,
    CutoffSelection,
    butterworth_lowpass,
    design_lowpass,
    lowpass_gain,
    optimal_cutoff,
)
from src.signal_prep.models import NormalizedMotion, RawMotion
from src.signal_prep.preprocessing import (
    PrepOptions,
    PreprocessLog,
    detect_release,
    extract_segment,
    joint_speed,
    mirror,
    preprocess_pitch,
    time_normalize,
)

__all__ = [
    "CutoffConfig",
    "CutoffSelection",
    "NormalizedMotion",
    "PrepOptions",
    "PreprocessLog",
    "RawMotion",
    "butterworth_lowpass",
    "design_lowpass",
    "detect_release",
    "extract_segment",
    "joint_speed",
    "lowpass_gain",
    "mirror",
    "optimal_cutoff",
    "preprocess_pitch",
    "time_normalize",
]
