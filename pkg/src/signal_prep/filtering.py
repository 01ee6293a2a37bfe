"""Zero-phase Butterworth low-pass filtering and residual-analysis cutoff selection.

The filter is a fourth-order Butterworth realized as two second-order
sections and run forward and backward (`scipy.signal.sosfiltfilt`) with odd
reflective padding of 3 x order samples, so the effective response has zero
phase and squared magnitude.
"""

import logging
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator
from scipy import signal as sps

from src.common.errors import SignalError

logger = logging.getLogger(__name__)

FILTER_ORDER = 4
PAD_LEN = 3 * FILTER_ORDER
MIN_FILTER_LENGTH = PAD_LEN + 1


class CutoffConfig(BaseModel):
    """Cutoff grid and tail fraction for residual analysis."""

    grid_min: float = Field(default=5.0, gt=0, description="Smallest candidate cutoff (Hz)")
    grid_max: float = Field(default=25.0, gt=0, description="Largest candidate cutoff (Hz)")
    grid_step: float = Field(default=0.5, gt=0, description="Grid spacing (Hz)")
    tail_fraction: float = Field(
        default=0.25, gt=0, le=1, description="Share of the grid used for the noise-floor fit"
    )
    min_length: int = Field(default=50, ge=MIN_FILTER_LENGTH, description="Shortest usable series")

    @model_validator(mode="after")
    def check_range(self) -> "CutoffConfig":
        if self.grid_max <= self.grid_min:
            raise ValueError("grid_max must exceed grid_min")
        return self

    def grid(self, fs: float) -> np.ndarray:
        """Candidate cutoffs strictly below Nyquist."""
        count = int(math.floor((self.grid_max - self.grid_min) / self.grid_step + 1e-9)) + 1
        grid = self.grid_min + self.grid_step * np.arange(count)
        grid = grid[grid < fs / 2.0]
        if grid.size < 2:
            raise SignalError(
                f"cutoff grid {self.grid_min}-{self.grid_max} Hz leaves fewer than two "
                f"candidates below Nyquist ({fs / 2.0} Hz)",
                fs=fs,
            )
        return grid


class CutoffSelection(BaseModel):
    """Outcome of residual analysis for one series."""

    cutoff: float = Field(description="Selected cutoff (Hz)")
    noise_floor: Optional[float] = Field(default=None, description="Extrapolated residual at 0 Hz")
    grid: list[float] = Field(default_factory=list, description="Candidate cutoffs (Hz)")
    residuals: list[float] = Field(default_factory=list, description="RMS residual per candidate")
    degenerate: bool = Field(default=False, description="Series was constant")
    warning: Optional[str] = Field(default=None)


def design_lowpass(fs: float, fc: float, order: int = FILTER_ORDER) -> np.ndarray:
    """Second-order sections of a Butterworth low-pass at `fc` Hz.

    Raises:
        SignalError: `fc` is not inside (0, fs/2).
    """
    if fs <= 0:
        raise SignalError(f"sampling rate must be positive, got {fs}", fs=fs)
    if not 0.0 < fc < fs / 2.0:
        raise SignalError(
            f"cutoff {fc} Hz outside (0, {fs / 2.0}) Hz", fc=fc, fs=fs
        )
    return sps.butter(order, fc, btype="low", fs=fs, output="sos")


def lowpass_gain(sos: np.ndarray, fs: float, freq: float) -> float:
    """Single-pass magnitude |H| of `sos` at `freq` Hz."""
    _, h = sps.sosfreqz(sos, worN=np.array([freq], dtype=np.float64), fs=fs)
    return float(np.abs(h[0]))


def butterworth_lowpass(data: np.ndarray, fs: float, fc: float, axis: int = 0) -> np.ndarray:
    """Zero-phase fourth-order low-pass of `data` along `axis`.

    Multi-channel arrays are filtered channel by channel along `axis`.

    Raises:
        SignalError: cutoff out of range or series shorter than 13 samples.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 0 or x.shape[axis] < MIN_FILTER_LENGTH:
        length = 0 if x.ndim == 0 else x.shape[axis]
        raise SignalError(
            f"series of {length} samples is too short to filter (need {MIN_FILTER_LENGTH})",
            length=length,
        )
    sos = design_lowpass(fs, fc)
    return sps.sosfiltfilt(sos, x, axis=axis, padtype="odd", padlen=PAD_LEN)


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x * x)))


def optimal_cutoff(
    series: np.ndarray,
    fs: float,
    config: Optional[CutoffConfig] = None,
) -> CutoffSelection:
    """Pick a cutoff by residual analysis.

    The RMS residual between the series and its filtered version is computed
    for every grid cutoff. A line fitted to the residuals of the top
    `tail_fraction` of the grid is extrapolated to 0 Hz as the noise floor;
    the smallest cutoff whose residual is at or below that floor is selected,
    or the grid maximum when none is.

    A constant series returns the grid maximum with `degenerate` set.

    Raises:
        SignalError: series shorter than `config.min_length`.
    """
    config = config or CutoffConfig()
    x = np.asarray(series, dtype=np.float64).reshape(-1)
    if x.size < config.min_length:
        raise SignalError(
            f"cutoff selection needs at least {config.min_length} samples, got {x.size}",
            length=int(x.size),
        )
    grid = config.grid(fs)

    if np.ptp(x) == 0.0:
        message = "constant series; cutoff set to grid maximum"
        logger.warning("Residual analysis: %s (%.1f Hz)", message, grid[-1])
        return CutoffSelection(
            cutoff=float(grid[-1]),
            grid=grid.tolist(),
            degenerate=True,
            warning=message,
        )

    residuals = np.array([_rms(x - butterworth_lowpass(x, fs, fc)) for fc in grid])

    n_tail = max(2, int(math.ceil(config.tail_fraction * grid.size)))
    slope, intercept = np.polyfit(grid[-n_tail:], residuals[-n_tail:], 1)
    floor = float(intercept)

    below = np.flatnonzero(residuals <= floor)
    cutoff = float(grid[below[0]]) if below.size else float(grid[-1])
    logger.debug(
        "Residual analysis: floor=%.4g slope=%.4g cutoff=%.1f Hz", floor, slope, cutoff
    )
    return CutoffSelection(
        cutoff=cutoff,
        noise_floor=floor,
        grid=grid.tolist(),
        residuals=residuals.tolist(),
    )
