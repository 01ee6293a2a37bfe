"""Pytest configuration and shared fixtures for the pitching benchmark tests."""

from pathlib import Path

import numpy as np
import pytest

from src.common.paths import RunLayout
from src.dataset.masking import restrict_corpus
from src.dataset.models import PitcherRecord, Region, RegionMask, WindowSpec
from src.dataset.synthetic import SynthConfig, synthesize_corpus
from src.harness.config import TrainConfig
from src.models.specs import GnnGruSpec, TransformerSpec


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator, fresh per test."""
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def synth_config() -> SynthConfig:
    """Ten pitchers, two per competitive level."""
    return SynthConfig(n_pitchers=10)


@pytest.fixture(scope="session")
def corpus(synth_config: SynthConfig) -> list[PitcherRecord]:
    """Normalized synthetic corpus shared by the whole session (read-only)."""
    return synthesize_corpus(synth_config, seed=0)


@pytest.fixture(scope="session")
def short_corpus(corpus: list[PitcherRecord]) -> list[PitcherRecord]:
    """Throwing-arm joints over the first 20 frames; keeps training tests quick."""
    return restrict_corpus(corpus, RegionMask.of(Region.THROWING_ARM), WindowSpec(index=2))


@pytest.fixture
def tiny_transformer() -> TransformerSpec:
    return TransformerSpec(heads=1, d_l=4, d_f=8, layers=1)


@pytest.fixture
def tiny_gnn_gru() -> GnnGruSpec:
    return GnnGruSpec(gnn_layers=1, hidden_units=4)


@pytest.fixture
def fast_train() -> TrainConfig:
    """Two epochs; enough to exercise the loop without waiting on convergence."""
    return TrainConfig(max_epochs=2, batch_size=16)


@pytest.fixture
def run_layout(tmp_path: Path) -> RunLayout:
    return RunLayout(tmp_path / "run")
