"""
Phase 3: Synthetic Corpus Tests

Level allocation, determinism and the planted ground truth of the generator.
"""
from collections import Counter

import numpy as np
import pytest
from pydantic import ValidationError

from src.common.errors import CorpusError
from src.dataset.models import SPEED_BAND_MPH, CompetitiveLevel, Handedness
from src.dataset.synthetic import (
    DEFAULT_PROPORTIONS,
    SynthConfig,
    allocate_levels,
    planted_features,
    synthesize_corpus,
    synthesize_raw_corpus,
)


@pytest.mark.phase3
class TestLevelAllocation:
    """Largest-remainder allocation of competitive levels"""

    def test_default_proportions_at_fifty(self):
        """Verify fifty pitchers reproduce the default 4/10/20/3/13 split"""
        counts = Counter(allocate_levels(50, DEFAULT_PROPORTIONS))
        assert [counts[lv] for lv in CompetitiveLevel] == [4, 10, 20, 3, 13]

    def test_two_per_level_at_ten(self):
        """Verify ten pitchers give every level two pitchers"""
        counts = Counter(allocate_levels(10, DEFAULT_PROPORTIONS))
        assert all(counts[lv] == 2 for lv in CompetitiveLevel)

    def test_total_preserved(self):
        """Verify the allocation always sums to the requested count"""
        for n in (2, 7, 13, 31):
            assert len(allocate_levels(n, DEFAULT_PROPORTIONS)) == n

    def test_proportions_need_every_level(self):
        """Verify a proportion table missing a level is rejected"""
        partial = {CompetitiveLevel.COLLEGIATE: 1.0, CompetitiveLevel.PROFESSIONAL: 1.0}
        with pytest.raises(ValidationError):
            SynthConfig(level_proportions=partial)


@pytest.mark.phase3
class TestSyntheticCorpus:
    """Normalized synthetic corpus"""

    def test_shape_of_session_corpus(self, corpus):
        """Verify ten pitchers with five 101-frame pitches each"""
        assert len(corpus) == 10
        assert all(len(r.pitches) == 5 for r in corpus)
        assert all(p.motion.shape == (101, 15, 3) for r in corpus for p in r.pitches)
        assert len({r.id for r in corpus}) == 10

    def test_two_pitchers_per_level(self, corpus):
        """Verify the session corpus covers every level twice"""
        counts = Counter(r.level for r in corpus)
        assert all(counts[lv] == 2 for lv in CompetitiveLevel)

    def test_speeds_in_band_and_fastest_first(self, corpus):
        """Verify speeds are plausible and pitches are ordered fastest first"""
        lo, hi = SPEED_BAND_MPH
        for record in corpus:
            speeds = [p.ball_speed for p in record.pitches]
            assert all(lo < s < hi for s in speeds)
            assert speeds == sorted(speeds, reverse=True)

    def test_left_handers_flagged_mirrored(self, corpus):
        """Verify mirrored flags follow handedness"""
        for record in corpus:
            assert record.mirrored == (record.handedness == Handedness.LEFT)

    def test_deterministic(self, synth_config, corpus):
        """Verify the same seed reproduces the corpus bit for bit"""
        again = synthesize_corpus(synth_config, seed=0)
        for a, b in zip(again, corpus):
            assert a.id == b.id and a.level == b.level
            for p, q in zip(a.pitches, b.pitches):
                assert p.ball_speed == q.ball_speed
                np.testing.assert_array_equal(p.motion, q.motion)

    def test_seed_changes_corpus(self, synth_config, corpus):
        """Verify a different seed draws different speeds"""
        other = synthesize_corpus(synth_config, seed=1)
        assert [r.mean_speed for r in other] != [r.mean_speed for r in corpus]

    def test_negative_seed_rejected(self, synth_config):
        """Verify a negative seed raises CorpusError"""
        with pytest.raises(CorpusError):
            synthesize_corpus(synth_config, seed=-1)

    def test_speed_out_of_band_reported(self):
        """Verify an outcome model pushing speeds past the band raises CorpusError"""
        with pytest.raises(CorpusError) as exc:
            synthesize_corpus(SynthConfig(n_pitchers=2, base_speed=120.0), seed=0)
        assert exc.value.context["pitcher_id"] == "P001"


@pytest.mark.phase3
class TestPlantedOutcome:
    """Ball speed follows the planted kinematic features"""

    def test_noise_free_speed_matches_outcome_model(self):
        """Verify speed minus the feature terms is constant within a pitcher"""
        config = SynthConfig(
            n_pitchers=2, marker_noise_sd=0.0, pitch_noise_sd=0.0, amplitude_jitter=0.05
        )
        (record, _) = synthesize_corpus(config, seed=2)

        residuals = []
        for pitch in record.pitches:
            f1, f2 = planted_features(pitch.motion)
            residuals.append(pitch.ball_speed - config.hip_coef * f1 - config.trunk_coef * f2)

        assert np.ptp(residuals) < 1e-9, "only the per-pitcher offset may remain"

    def test_features_are_positive(self, corpus):
        """Verify hip drive and trunk rotation rates are positive on real pitches"""
        f1, f2 = planted_features(corpus[0].pitches[0].motion)
        assert f1 > 0.5
        assert f2 > 5.0

    def test_raw_corpus_shares_draws(self, synth_config, corpus):
        """Verify raw captures carry the same speeds as the normalized corpus"""
        raw = synthesize_raw_corpus(synth_config, seed=0)

        for pitches, record in zip(raw, corpus):
            assert pitches[0].pitcher_id == record.id
            assert sorted(p.ball_speed for p in pitches) == sorted(
                p.ball_speed for p in record.pitches
            )
            assert pitches[0].raw.handedness == record.handedness
