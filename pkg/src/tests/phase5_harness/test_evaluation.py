"""
Phase 5: Evaluation Tests

LOSOCV and within-individual protocols end to end on a small restricted
corpus, baseline ranking and fold failure reporting. Slow runs check the
generalization gap on planted synthetic corpora.
"""
import numpy as np
import pytest
from pydantic import ValidationError

from src.common.errors import EvaluationError
from src.dataset.synthetic import SynthConfig, synthesize_corpus
from src.harness.config import TrainConfig
from src.harness import evaluation
from src.harness.evaluation import (
    FOLD_COLUMNS,
    FoldOutcome,
    evaluate_losocv,
    evaluate_within_individual,
    select_baseline,
)
from src.models.specs import SMALLEST_TRANSFORMER, parameter_count
from tests.models import fake_evaluation, make_records


@pytest.mark.phase5
class TestLosocv:
    """Cross-individual evaluation"""

    def test_one_outcome_per_pitcher(self, short_corpus, tiny_transformer, fast_train):
        """Verify each pitcher is predicted once by a model that never saw it"""
        result = evaluate_losocv(tiny_transformer, short_corpus, fast_train)

        assert [f.test_pitcher_id for f in result.folds] == [r.id for r in short_corpus]
        assert all(len(f.predictions) == 5 for f in result.folds)
        assert all(1 <= f.epochs_run <= fast_train.max_epochs for f in result.folds)
        assert result.parameter_count == parameter_count(tiny_transformer, 3, 20)
        assert np.isfinite(result.r2) and result.r2 <= 1.0

    def test_fold_table(self, short_corpus, tiny_transformer, fast_train):
        """Verify the per-fold table has one row per pitcher in the fixed column order"""
        frame = evaluate_losocv(tiny_transformer, short_corpus[:4], fast_train).to_frame()

        assert list(frame.columns) == FOLD_COLUMNS
        assert len(frame) == 4
        assert set(frame["spec"]) == {tiny_transformer.label}

    def test_workers_do_not_change_results(self, short_corpus, tiny_gnn_gru, fast_train):
        """Verify parallel folds reproduce sequential folds exactly"""
        records = short_corpus[:4]

        sequential = evaluate_losocv(tiny_gnn_gru, records, fast_train)
        parallel = evaluate_losocv(tiny_gnn_gru, records, fast_train, workers=2)

        assert parallel.r2 == sequential.r2
        assert [f.predictions for f in parallel.folds] == [f.predictions for f in sequential.folds]

    def test_repeat_changes_seeds(self, short_corpus, tiny_transformer, fast_train):
        """Verify a second repeat draws different fold seeds"""
        records = short_corpus[:4]
        first = evaluate_losocv(tiny_transformer, records, fast_train, repeat=0)
        second = evaluate_losocv(tiny_transformer, records, fast_train, repeat=1)
        assert first.pairs != second.pairs

    def test_fold_failure_names_pitcher(self, tiny_transformer, fast_train):
        """Verify a failing fold is reported with its pitcher and cause"""
        records = make_records(3)
        odd = make_records(1, n_frames=3, seed=5)[0]
        records[2] = odd.model_copy(
            update={
                "id": "T002",
                "pitches": [p.model_copy(update={"pitcher_id": "T002"}) for p in odd.pitches],
            }
        )

        with pytest.raises(EvaluationError) as exc:
            evaluate_losocv(tiny_transformer, records, fast_train)

        assert exc.value.context["pitcher_id"] == "T000"
        assert exc.value.context["fold"] == 0
        assert exc.value.context["cause"] == "ShapeMismatchError"

    def test_leaked_standardization_rejected(
        self, monkeypatch, short_corpus, tiny_transformer, fast_train
    ):
        """Verify a fold whose scaling saw the held-out pitches fails with the pitcher named"""
        records = short_corpus[:3]
        held_out = list(records[0].pitches)
        fit = evaluation.train

        def leaky_train(model, samples, config, seed=0):
            return fit(model, samples + held_out, config, seed)

        monkeypatch.setattr(evaluation, "train", leaky_train)

        with pytest.raises(EvaluationError) as exc:
            evaluate_losocv(tiny_transformer, records, fast_train)

        assert exc.value.context["pitcher_id"] == records[0].id
        assert "input_mean" in exc.value.context["statistics"]


@pytest.mark.phase5
class TestFoldOutcome:
    """Per-fold result validation"""

    def _outcome(self, n_pitches: int, n_predictions: int) -> dict:
        return {
            "fold": 0,
            "test_pitcher_id": "T000",
            "predictions": [80.0] * n_predictions,
            "truths": [80.0] * n_pitches,
            "epochs_run": 1,
            "train_r2": 0.5,
        }

    def test_five_pitches_accepted(self):
        """Verify a fold with five test pitches validates"""
        outcome = FoldOutcome.model_validate(self._outcome(5, 5))
        assert outcome.true_mean == pytest.approx(80.0)

    @pytest.mark.parametrize("n", [1, 4, 6])
    def test_other_pitch_counts_rejected(self, n):
        """Verify a fold must hold exactly five test pitches"""
        with pytest.raises(ValidationError, match="expected 5"):
            FoldOutcome.model_validate(self._outcome(n, n))

    def test_length_mismatch_rejected(self):
        """Verify predictions and truths must pair up"""
        with pytest.raises(ValidationError, match="4 predictions for 5 test pitches"):
            FoldOutcome.model_validate(self._outcome(5, 4))


@pytest.mark.phase5
class TestWithinIndividual:
    """Within-individual evaluation"""

    def test_split_sizes(self, short_corpus, tiny_transformer, fast_train):
        """Verify four training pitches and one test pitch per pitcher"""
        result = evaluate_within_individual(tiny_transformer, short_corpus, fast_train)

        assert result.n_train == 40
        assert result.n_test == 10
        assert sorted(result.pitcher_ids) == sorted(r.id for r in short_corpus)
        assert len(result.predictions) == len(result.truths) == 10
        assert np.isfinite(result.r2) and np.isfinite(result.pitcher_mean_r2)


@pytest.mark.phase5
class TestBaselineSelection:
    """Ranking the model grid"""

    def test_ranked_best_first(self, short_corpus, tiny_transformer, tiny_gnn_gru, fast_train):
        """Verify rows are ranked by mean cross-individual R^2"""
        records = short_corpus[:5]

        selection = select_baseline([tiny_transformer, tiny_gnn_gru], records, fast_train)

        assert [r.rank for r in selection.rows] == [1, 2]
        assert selection.rows[0].r2_mean >= selection.rows[1].r2_mean
        assert selection.best == selection.rows[0]
        assert selection.evaluation_of(tiny_gnn_gru).spec == tiny_gnn_gru
        assert list(selection.to_frame()["rank"]) == [1, 2]

    def test_ties_prefer_fewer_parameters(self, monkeypatch, tiny_transformer, tiny_gnn_gru):
        """Verify equal scores go to the smaller model, ahead of grid order"""
        bigger = tiny_transformer.model_copy(update={"layers": 2})
        records = make_records(4)

        def fixed_score(spec, records, config, repeat=0, workers=1):
            result = fake_evaluation(records, lambda i, r: [0.0] * 5, spec)
            return result.model_copy(
                update={
                    "r2": 0.7 if spec.architecture == "gnn_gru" else 0.5,
                    "parameter_count": parameter_count(spec, 1, 2),
                }
            )

        monkeypatch.setattr(evaluation, "evaluate_losocv", fixed_score)

        grid = [bigger, tiny_transformer, tiny_gnn_gru]
        selection = select_baseline(grid, records, TrainConfig())

        assert [r.spec for r in selection.rows] == [tiny_gnn_gru, tiny_transformer, bigger]
        assert [r.rank for r in selection.rows] == [1, 2, 3]

    def test_repeats_report_spread(self, short_corpus, tiny_transformer, fast_train):
        """Verify several selection repeats give a mean and a sample deviation"""
        config = fast_train.model_copy(update={"selection_repeats": 2})

        selection = select_baseline([tiny_transformer], short_corpus[:4], config)

        row = selection.rows[0]
        assert row.repeats == 2
        assert row.r2_sd >= 0.0

    def test_empty_grid_rejected(self, short_corpus, fast_train):
        """Verify an empty grid raises EvaluationError"""
        with pytest.raises(EvaluationError):
            select_baseline([], short_corpus, fast_train)


@pytest.mark.phase5
@pytest.mark.slow
class TestGeneralizationGap:
    """Planted per-pitcher offsets hurt unseen pitchers, not seen ones"""

    @pytest.mark.timeout(3600)
    def test_offsets_lower_cross_individual_r2(self):
        """Verify large kinematics-invisible offsets cut LOSOCV R^2 by at least 0.15"""
        planted = {"n_pitchers": 20, "expert_offset": 0.0, "intermediate_offset": 0.0}
        flat = synthesize_corpus(SynthConfig(**planted, offset_sd=0.0), seed=0)
        spread = synthesize_corpus(SynthConfig(**planted, offset_sd=3.0), seed=0)
        config = TrainConfig()

        without = evaluate_losocv(SMALLEST_TRANSFORMER, flat, config, workers=4)
        with_offsets = evaluate_losocv(SMALLEST_TRANSFORMER, spread, config, workers=4)

        assert without.r2 - with_offsets.r2 >= 0.15, (without.r2, with_offsets.r2)

    @pytest.mark.timeout(7200)
    def test_gap_across_seeds(self):
        """Verify within-individual R^2 >= 0.85 and LOSOCV at least 0.15 lower in 4 of 5 seeds"""
        synth = SynthConfig(n_pitchers=30, offset_sd=2.0)
        outcomes = []
        for seed in range(5):
            records = synthesize_corpus(synth, seed=seed)
            config = TrainConfig(seed=seed)

            within = evaluate_within_individual(SMALLEST_TRANSFORMER, records, config)
            cross = evaluate_losocv(SMALLEST_TRANSFORMER, records, config, workers=4)
            outcomes.append((within.r2, cross.r2))

        held = [w >= 0.85 and w - c >= 0.15 for w, c in outcomes]
        assert sum(held) >= 4, outcomes
