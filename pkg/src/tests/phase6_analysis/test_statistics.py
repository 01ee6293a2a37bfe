"""
Phase 6: Statistics Tests

Descriptive statistics, the pooled t-test against scipy, the group
separation ratio and the calibration slope.
"""
import numpy as np
import pytest
from scipy import stats

from src.analysis.statistical_analysis import (
    calculate_descriptive_statistics,
    calibration_slope,
    eta,
    eta_from_summary,
    pooled_t_test,
    student_t_two_tailed,
)
from src.common.errors import StatisticsError


@pytest.mark.phase6
class TestDescriptiveStatistics:
    """Sample summaries"""

    def test_basic_values(self):
        """Verify mean, median, sample SD and standard error"""
        result = calculate_descriptive_statistics([2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0])

        assert result.mean == pytest.approx(5.0)
        assert result.median == pytest.approx(4.5)
        assert result.std_dev == pytest.approx(np.std([2, 4, 4, 4, 5, 5, 7, 9], ddof=1))
        assert result.standard_error == pytest.approx(result.std_dev / np.sqrt(8))
        low, high = result.confidence_interval_95
        assert low < result.mean < high

    def test_single_value_has_zero_spread(self):
        """Verify one observation gives zero SD instead of NaN"""
        result = calculate_descriptive_statistics([3.5])
        assert result.std_dev == 0.0 and result.variance == 0.0

    @pytest.mark.parametrize("data", [[], [1.0, np.nan], [np.inf]])
    def test_invalid_data_rejected(self, data):
        """Verify empty or non-finite data raises StatisticsError"""
        with pytest.raises(StatisticsError):
            calculate_descriptive_statistics(data)


@pytest.mark.phase6
class TestPooledTTest:
    """Independent-samples t-test with pooled variance"""

    def test_known_example(self):
        """Verify t, df, Cohen's d and p on a hand-computed example"""
        result = pooled_t_test([1.0, 2.0, 3.0], [3.0, 4.0, 5.0])

        assert result.t_statistic == pytest.approx(-2.449490, abs=1e-6)
        assert result.degrees_of_freedom == 4
        assert result.cohens_d == pytest.approx(-2.0)
        assert result.p_value == pytest.approx(0.0705, abs=1e-4)
        assert result.effect_size_interpretation == "large"
        assert not result.is_significant

    def test_matches_scipy(self, rng):
        """Verify t and p agree with scipy's equal-variance test"""
        a = rng.normal(1.0, 1.0, size=17)
        b = rng.normal(0.2, 1.5, size=23)

        ours = pooled_t_test(a, b)
        reference = stats.ttest_ind(a, b, equal_var=True)

        assert ours.t_statistic == pytest.approx(reference.statistic, rel=1e-10)
        assert ours.p_value == pytest.approx(reference.pvalue, rel=1e-8)

    @pytest.mark.parametrize("t,df", [(0.0, 5), (1.3, 3), (-2.7, 48), (8.0, 10)])
    def test_two_tailed_tail(self, t, df):
        """Verify the incomplete-beta tail equals twice the t survival function"""
        assert student_t_two_tailed(t, df) == pytest.approx(2 * stats.t.sf(abs(t), df), rel=1e-9)

    def test_too_few_observations(self):
        """Verify each sample needs two values"""
        with pytest.raises(StatisticsError) as exc:
            pooled_t_test([1.0], [2.0, 3.0], labels=("x", "y"))
        assert exc.value.context["sizes"] == {"x": 1, "y": 2}

    def test_zero_pooled_variance(self):
        """Verify two constant samples raise StatisticsError"""
        with pytest.raises(StatisticsError, match="zero pooled variance"):
            pooled_t_test([0.0, 0.0, 0.0], [1.0, 1.0])

    @pytest.mark.parametrize(
        "d,label", [(0.1, "negligible"), (0.3, "small"), (0.6, "medium"), (-1.2, "large")]
    )
    def test_effect_size_labels(self, d, label):
        """Verify Cohen's thresholds at 0.2, 0.5 and 0.8"""
        result = pooled_t_test([0.0, 2.0], [1.0, 3.0])
        assert result.model_copy(update={"cohens_d": d}).effect_size_interpretation == label


@pytest.mark.phase6
class TestEta:
    """Group separation ratio"""

    def test_from_summary(self):
        """Verify the summary form from group means and SDs"""
        assert eta_from_summary(84.54, 4.39, 77.60, 4.41) == pytest.approx(0.789, abs=1e-3)

    def test_from_samples(self):
        """Verify |mean difference| over the sum of sample SDs"""
        assert eta([0.0, 2.0], [10.0, 12.0]) == pytest.approx(10.0 / (2 * np.sqrt(2.0)))

    def test_symmetric(self, rng):
        """Verify swapping the groups leaves eta unchanged"""
        a, b = rng.normal(80, 3, 6), rng.normal(75, 4, 9)
        assert eta(a, b) == pytest.approx(eta(b, a))

    def test_group_of_one_rejected(self):
        """Verify a single-pitcher group cannot be scored"""
        with pytest.raises(StatisticsError):
            eta([80.0], [70.0, 72.0])

    def test_zero_spread_rejected(self):
        """Verify two constant groups raise StatisticsError"""
        with pytest.raises(StatisticsError):
            eta([80.0, 80.0], [70.0, 70.0])
        with pytest.raises(StatisticsError):
            eta_from_summary(80.0, 0.0, 70.0, 0.0)


@pytest.mark.phase6
class TestCalibrationSlope:
    """Slope of predicted on true pitcher means"""

    def test_shrunk_predictions(self):
        """Verify predictions pulled halfway to the centre give slope 0.5"""
        truths = np.array([70.0, 75.0, 80.0, 85.0])
        assert calibration_slope(truths, 0.5 * truths + 39.0) == pytest.approx(0.5)

    def test_constant_truths_rejected(self):
        """Verify identical truths have no slope"""
        with pytest.raises(StatisticsError):
            calibration_slope([80.0, 80.0, 80.0], [79.0, 80.0, 81.0])

    def test_lengths_checked(self):
        """Verify mismatched lengths raise StatisticsError"""
        with pytest.raises(StatisticsError):
            calibration_slope([70.0, 80.0], [70.0])
