"""Leave-one-pitcher-out folds and the within-individual split."""

from dataclasses import dataclass

import numpy as np

from src.common.errors import CorpusError, EvaluationError
from src.dataset.corpus import PITCHES_PER_PITCHER
from src.dataset.models import MotionSample, PitcherRecord


@dataclass(frozen=True)
class Fold:
    index: int
    test_pitcher_id: str
    train: list[MotionSample]
    test: list[MotionSample]


@dataclass(frozen=True)
class Split:
    train: list[MotionSample]
    test: list[MotionSample]


def _check_ids(records: list[PitcherRecord]) -> None:
    ids = [r.id for r in records]
    duplicates = sorted({i for i in ids if ids.count(i) > 1})
    if duplicates:
        raise CorpusError(f"duplicate pitcher ids {duplicates}", duplicates=duplicates)


def assert_partition(fold: Fold) -> None:
    """The held-out pitcher must not appear in the training portion."""
    leaked = [s for s in fold.train if s.pitcher_id == fold.test_pitcher_id]
    if leaked:
        raise EvaluationError(
            f"fold {fold.index}: test pitcher {fold.test_pitcher_id} found in training data",
            pitcher_id=fold.test_pitcher_id,
        )


def losocv_folds(records: list[PitcherRecord]) -> list[Fold]:
    """One fold per pitcher; each trains on every pitch of the others.

    Raises:
        CorpusError: fewer than 2 pitchers or duplicate ids.
    """
    if len(records) < 2:
        raise CorpusError(f"LOSOCV needs at least 2 pitchers, got {len(records)}")
    _check_ids(records)
    folds = []
    for i, held_out in enumerate(records):
        train = [s for r in records if r.id != held_out.id for s in r.pitches]
        fold = Fold(index=i, test_pitcher_id=held_out.id, train=train, test=list(held_out.pitches))
        assert_partition(fold)
        folds.append(fold)
    return folds


def within_individual_split(records: list[PitcherRecord], seed: int) -> Split:
    """One uniformly drawn test pitch per pitcher; the rest train.

    Raises:
        CorpusError: a pitcher without exactly five pitches.
    """
    _check_ids(records)
    wrong = [r.id for r in records if len(r.pitches) != PITCHES_PER_PITCHER]
    if wrong:
        raise CorpusError(
            f"within-individual split needs exactly {PITCHES_PER_PITCHER} pitches per pitcher",
            pitchers=wrong,
        )
    rng = np.random.default_rng(seed)
    train: list[MotionSample] = []
    test: list[MotionSample] = []
    for record in records:
        pick = int(rng.integers(len(record.pitches)))
        for k, sample in enumerate(record.pitches):
            (test if k == pick else train).append(sample)
    return Split(train=train, test=test)
