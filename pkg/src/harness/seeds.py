"""Deterministic seed derivation for folds, repeats and ablation cells."""

from typing import Literal, Optional

import numpy as np

from src.dataset.models import Region

Protocol = Literal["losocv", "within_individual"]

_REGION_CODES = {region: i + 1 for i, region in enumerate(Region)}
_PROTOCOL_CODES: dict[str, int] = {"losocv": 0, "within_individual": 1}


def derive_seed(
    base: int,
    fold: int = 0,
    repeat: int = 0,
    region: Optional[Region] = None,
    window: Optional[int] = None,
    protocol: Protocol = "losocv",
) -> int:
    """Seed as a pure function of (base, fold, repeat, region, window, protocol).

    The protocol tag keeps within-individual streams apart from LOSOCV folds
    that share the other coordinates.
    """
    entropy = [
        int(base),
        int(fold),
        int(repeat),
        _REGION_CODES[region] if region is not None else 0,
        int(window) if window is not None else 0,
        _PROTOCOL_CODES[protocol],
    ]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint32)[0])
