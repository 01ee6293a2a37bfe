"""
Phase 6: Spatiotemporal Ablation Tests

Cell aggregation, emergence windows, grid completeness and small ablation
runs over the synthetic corpus.
"""
import pytest
from pydantic import ValidationError

from src.analysis.ablation import (
    ABLATION_COLUMNS,
    AblationCell,
    AblationConfig,
    AblationSummary,
    check_rectangular,
    emergence_window,
    run_ablation,
    summarize_cells,
)
from src.common.errors import EvaluationError
from src.dataset.models import Region
from src.harness.config import TrainConfig

ARM = Region.THROWING_ARM
TRUNK = Region.TRUNK


def _series(means: list[float], region: Region = ARM) -> list[AblationSummary]:
    return [
        AblationSummary(region=region, window=w, n_frames=10 * w, r2_mean=m, r2_sd=0.0, repeats=1)
        for w, m in enumerate(means, start=1)
    ]


@pytest.fixture
def one_epoch() -> TrainConfig:
    return TrainConfig(max_epochs=1, batch_size=32)


@pytest.mark.phase6
class TestSummaries:
    """Aggregation of repeats"""

    def test_mean_and_sample_sd(self):
        """Verify two repeats give their mean and n-1 standard deviation"""
        cells = [
            AblationCell(region=ARM, window=3, repeat=k, r2=r) for k, r in enumerate([0.2, 0.4])
        ]

        (summary,) = summarize_cells(cells)

        assert summary.r2_mean == pytest.approx(0.3)
        assert summary.r2_sd == pytest.approx(0.141421, abs=1e-6)
        assert summary.n_frames == 30
        assert summary.repeats == 2

    def test_single_repeat_has_zero_sd(self):
        """Verify one repeat reports SD 0"""
        (summary,) = summarize_cells([AblationCell(region=TRUNK, window=10, repeat=0, r2=-0.5)])
        assert summary.r2_sd == 0.0
        assert summary.n_frames == 101

    def test_region_then_window_order(self):
        """Verify summaries keep first-seen region and window order"""
        cells = [
            AblationCell(region=region, window=w, repeat=0, r2=0.0)
            for region in (TRUNK, ARM)
            for w in (1, 2)
        ]
        keys = [(s.region, s.window) for s in summarize_cells(cells)]
        assert keys == [(TRUNK, 1), (TRUNK, 2), (ARM, 1), (ARM, 2)]

    def test_non_finite_cell_rejected(self):
        """Verify a NaN R^2 cannot enter the grid"""
        with pytest.raises(ValidationError):
            AblationCell(region=ARM, window=1, repeat=0, r2=float("nan"))


@pytest.mark.phase6
class TestEmergence:
    """First window above the threshold"""

    def test_first_window_above_threshold(self):
        """Verify the earliest window whose mean exceeds the threshold"""
        assert emergence_window(_series([0.1, 0.3, 0.2, 0.5]), 0.25) == 2

    def test_threshold_is_strict(self):
        """Verify a mean equal to the threshold has not emerged"""
        assert emergence_window(_series([0.25, 0.26]), 0.25) == 2

    def test_never_emerges(self):
        """Verify None when no window exceeds the threshold"""
        assert emergence_window(_series([-0.2, 0.0, 0.1]), 0.25) is None


@pytest.mark.phase6
class TestGridShape:
    """Rectangular region x window x repeat grid"""

    def _cells(self, repeats: int = 1) -> list[AblationCell]:
        return [
            AblationCell(region=ARM, window=w, repeat=k, r2=0.1)
            for w in range(1, 11)
            for k in range(repeats)
        ]

    def test_complete_grid_accepted(self):
        """Verify a full grid passes"""
        check_rectangular(self._cells(2), [ARM], 2)

    def test_missing_cell_rejected(self):
        """Verify a grid with a missing cell raises EvaluationError"""
        with pytest.raises(EvaluationError):
            check_rectangular(self._cells()[:-1], [ARM], 1)

    def test_duplicate_cell_rejected(self):
        """Verify a repeated cell raises EvaluationError"""
        cells = self._cells()
        with pytest.raises(EvaluationError):
            check_rectangular(cells + cells[:1], [ARM], 1)

    def test_regions_must_be_distinct(self):
        """Verify an ablation config cannot list a region twice"""
        with pytest.raises(ValidationError):
            AblationConfig(regions=[ARM, ARM])


@pytest.mark.phase6
class TestRunAblation:
    """Region x window LOSOCV runs"""

    def test_single_region(self, corpus, tiny_transformer, one_epoch):
        """Verify one region over ten windows yields ten summarized cells"""
        settings = AblationConfig(repeats=1, regions=[ARM], include_control=False)

        result = run_ablation(corpus[:4], tiny_transformer, one_epoch, settings)

        assert len(result.cells) == 10
        assert [s.window for s in result.summary] == list(range(1, 11))
        assert [s.n_frames for s in result.series(ARM)][-1] == 101
        assert result.control is None
        assert set(result.emergence) == {ARM}
        assert list(result.to_frame().columns) == ABLATION_COLUMNS

    def test_failing_cell_named(self, short_corpus, tiny_transformer, one_epoch):
        """Verify a cell that cannot be built is reported with its region, window and repeat"""
        settings = AblationConfig(repeats=1, regions=[TRUNK], include_control=False)

        with pytest.raises(EvaluationError) as exc:
            run_ablation(short_corpus[:4], tiny_transformer, one_epoch, settings)

        assert exc.value.context["region"] == "trunk"
        assert exc.value.context["window"] == 1
        assert exc.value.context["repeat"] == 0

    @pytest.mark.slow
    def test_workers_and_control(self, corpus, tiny_transformer, one_epoch):
        """Verify a parallel run with control matches the sequential run"""
        settings = AblationConfig(repeats=2, regions=[ARM, TRUNK], include_control=True)

        sequential = run_ablation(corpus[:4], tiny_transformer, one_epoch, settings)
        parallel = run_ablation(corpus[:4], tiny_transformer, one_epoch, settings, workers=2)

        assert [c.r2 for c in parallel.cells] == [c.r2 for c in sequential.cells]
        assert parallel.control == sequential.control
        assert parallel.control.repeats == 2
        assert len(parallel.summary) == 20
