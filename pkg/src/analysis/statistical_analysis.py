"""Statistical analysis of prediction errors and group speeds.

This module provides descriptive statistics, the pooled-variance
independent-samples t-test with Cohen's d, the group-separation ratio used
to choose the expertise grouping, and the calibration slope of predicted
against true pitcher means.
"""

from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, Field, computed_field
from scipy.special import betainc

from src.common.errors import StatisticsError


class DescriptiveStatistics(BaseModel):
    """Descriptive statistics for a dataset."""

    mean: float = Field(description="Arithmetic mean")
    median: float = Field(description="Median (50th percentile)")
    std_dev: float = Field(description="Sample standard deviation (n-1); 0 for one value")
    variance: float = Field(description="Sample variance (n-1); 0 for one value")
    min_value: float = Field(description="Minimum value")
    max_value: float = Field(description="Maximum value")
    sample_size: int = Field(description="Number of samples", ge=1)
    standard_error: float = Field(description="Standard error of the mean")

    @computed_field
    @property
    def confidence_interval_95(self) -> tuple[float, float]:
        """Normal-approximation 95% interval for the mean."""
        margin_of_error = 1.96 * self.standard_error
        return (self.mean - margin_of_error, self.mean + margin_of_error)


class TestResult(BaseModel):
    """Pooled-variance independent-samples t-test between two groups."""

    __test__ = False  # not a pytest class

    label_a: str = Field(default="a", description="Name of the first sample")
    label_b: str = Field(default="b", description="Name of the second sample")
    stats_a: DescriptiveStatistics
    stats_b: DescriptiveStatistics

    t_statistic: float = Field(description="Student's t-statistic, sign of mean_a - mean_b")
    degrees_of_freedom: int = Field(description="n_a + n_b - 2")
    p_value: float = Field(ge=0.0, le=1.0, description="Two-tailed p-value")
    cohens_d: float = Field(description="(mean_a - mean_b) / pooled SD")
    alpha: float = Field(default=0.05, description="Significance level")

    @computed_field
    @property
    def is_significant(self) -> bool:
        return self.p_value < self.alpha

    @computed_field
    @property
    def effect_size_interpretation(self) -> str:
        """Interpret the effect size using Cohen's guidelines."""
        abs_d = abs(self.cohens_d)
        if abs_d < 0.2:
            return "negligible"
        elif abs_d < 0.5:
            return "small"
        elif abs_d < 0.8:
            return "medium"
        else:
            return "large"


def _clean(data: Sequence[float], what: str) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.size == 0:
        raise StatisticsError(f"{what}: data cannot be empty")
    if not np.all(np.isfinite(arr)):
        raise StatisticsError(f"{what}: data contains NaN or infinite values")
    return arr


def calculate_descriptive_statistics(data: Sequence[float]) -> DescriptiveStatistics:
    """Calculate descriptive statistics for a dataset.

    Args:
        data: Numeric values.

    Returns:
        DescriptiveStatistics object with all calculated metrics.

    Raises:
        StatisticsError: If data is empty or contains invalid values.
    """
    arr = _clean(data, "descriptive statistics")
    n = len(arr)
    variance = float(np.var(arr, ddof=1)) if n > 1 else 0.0
    std_val = float(np.sqrt(variance))

    return DescriptiveStatistics(
        mean=float(np.mean(arr)),
        median=float(np.median(arr)),
        std_dev=std_val,
        variance=variance,
        min_value=float(np.min(arr)),
        max_value=float(np.max(arr)),
        sample_size=n,
        standard_error=std_val / np.sqrt(n),
    )


def student_t_two_tailed(t: float, df: int) -> float:
    """P(|T| >= |t|) for Student's t with `df` degrees of freedom.

    Uses the regularized incomplete beta identity
    P = I_{df / (df + t^2)}(df / 2, 1 / 2).
    """
    if df < 1:
        raise StatisticsError(f"degrees of freedom must be positive, got {df}")
    x = df / (df + t * t)
    return float(min(1.0, max(0.0, betainc(df / 2.0, 0.5, x))))


def pooled_t_test(
    sample_a: Sequence[float],
    sample_b: Sequence[float],
    alpha: float = 0.05,
    labels: tuple[str, str] = ("a", "b"),
) -> TestResult:
    """Independent-samples t-test with pooled variance.

    Raises:
        StatisticsError: a sample has fewer than 2 values, or both samples
            are constant (zero pooled variance).
    """
    a = _clean(sample_a, labels[0])
    b = _clean(sample_b, labels[1])
    if len(a) < 2 or len(b) < 2:
        raise StatisticsError(
            "each sample must have at least 2 observations",
            sizes={labels[0]: len(a), labels[1]: len(b)},
        )

    stats_a = calculate_descriptive_statistics(a)
    stats_b = calculate_descriptive_statistics(b)
    n1, n2 = len(a), len(b)
    df = n1 + n2 - 2
    pooled_var = ((n1 - 1) * stats_a.variance + (n2 - 1) * stats_b.variance) / df
    if pooled_var <= 0.0:
        raise StatisticsError(
            f"zero pooled variance between {labels[0]} and {labels[1]}; t-test undefined"
        )

    pooled_sd = float(np.sqrt(pooled_var))
    diff = stats_a.mean - stats_b.mean
    t_stat = diff / (pooled_sd * np.sqrt(1.0 / n1 + 1.0 / n2))

    return TestResult(
        label_a=labels[0],
        label_b=labels[1],
        stats_a=stats_a,
        stats_b=stats_b,
        t_statistic=float(t_stat),
        degrees_of_freedom=df,
        p_value=student_t_two_tailed(float(t_stat), df),
        cohens_d=diff / pooled_sd,
        alpha=alpha,
    )


def eta(speeds_a: Sequence[float], speeds_b: Sequence[float]) -> float:
    """Group separation |mean_a - mean_b| / (sd_a + sd_b) with sample SDs.

    Raises:
        StatisticsError: a group has fewer than 2 values or both SDs are 0.
    """
    a = _clean(speeds_a, "eta group a")
    b = _clean(speeds_b, "eta group b")
    if len(a) < 2 or len(b) < 2:
        raise StatisticsError(
            "eta needs at least 2 pitchers per group", sizes=[len(a), len(b)]
        )
    spread = float(np.std(a, ddof=1) + np.std(b, ddof=1))
    if spread == 0.0:
        raise StatisticsError("eta undefined: both groups have zero spread")
    return abs(float(a.mean() - b.mean())) / spread


def eta_from_summary(mean_a: float, sd_a: float, mean_b: float, sd_b: float) -> float:
    """Eta from group means and SDs."""
    if sd_a + sd_b <= 0:
        raise StatisticsError("eta undefined: both groups have zero spread")
    return abs(mean_a - mean_b) / (sd_a + sd_b)


def calibration_slope(truths: Sequence[float], predictions: Sequence[float]) -> float:
    """Least-squares slope of predicted on true values.

    Below 1 means predictions are pulled toward the centre: low truths are
    overestimated and high truths underestimated.
    """
    y = _clean(truths, "calibration truths")
    y_hat = _clean(predictions, "calibration predictions")
    if y.shape != y_hat.shape or len(y) < 2:
        raise StatisticsError("calibration needs two equal-length samples of size >= 2")
    if np.ptp(y) == 0.0:
        raise StatisticsError("calibration slope undefined: all truths identical")
    slope, _ = np.polyfit(y, y_hat, 1)
    return float(slope)
