"""Expertise-bias analysis, spatiotemporal ablation and the statistics behind them."""

from src.analysis.ablation import (
    AblationCell,
    AblationConfig,
    AblationResult,
    AblationSummary,
    emergence_window,
    run_ablation,
    summarize_cells,
)
from src.analysis.expertise import (
    Analysis1Result,
    ErrorStats,
    GroupingCandidate,
    GroupingSearch,
    candidate_sets,
    error_stats,
    run_analysis1,
    search_grouping,
)
from src.analysis.statistical_analysis import (
    DescriptiveStatistics,
    TestResult,
    calculate_descriptive_statistics,
    calibration_slope,
    eta,
    eta_from_summary,
    pooled_t_test,
    student_t_two_tailed,
)

__all__ = [
    # Statistics
    "DescriptiveStatistics",
    "TestResult",
    "calculate_descriptive_statistics",
    "calibration_slope",
    "eta",
    "eta_from_summary",
    "pooled_t_test",
    "student_t_two_tailed",
    # Analysis 1
    "Analysis1Result",
    "ErrorStats",
    "GroupingCandidate",
    "GroupingSearch",
    "candidate_sets",
    "error_stats",
    "run_analysis1",
    "search_grouping",
    # Analysis 2
    "AblationCell",
    "AblationConfig",
    "AblationResult",
    "AblationSummary",
    "emergence_window",
    "run_ablation",
    "summarize_cells",
]
