"""Run configuration: environment, flat key=value config files and CLI flags.

`RunConfig` precedence, lowest first: field defaults, the file given with
``--config``, explicit command-line flags. Only `Settings` reads the
environment: ``PITCHBENCH_OUTPUT_ROOT`` and ``PITCHBENCH_LOG_LEVEL``.

Config file format, one ``key=value`` per line, ``#`` starts a comment::

    # desk-scale ablation
    pitchers=10
    repeats=2
    grid=transformer:2,32,64
    learning_rate=0.001

Keys are the `RunConfig` field names; unknown keys are rejected.
"""

from pathlib import Path
from typing import Any, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.analysis.ablation import AblationConfig
from src.common.errors import ModelConfigError
from src.common.paths import RESULTS_DIR
from src.dataset.synthetic import SynthConfig
from src.harness.config import TrainConfig
from src.models.specs import SMALLEST_TRANSFORMER, ModelSpec, parse_grid, parse_spec


class Settings(BaseSettings):
    """Process-wide settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="PITCHBENCH_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    output_root: Path = Field(
        default=RESULTS_DIR,
        description="Parent directory of run directories when --out is not given",
    )

    log_level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Log level must be one of {valid_levels}")
        return v.upper()


class RunConfig(BaseModel):
    """Everything a command needs; echoed verbatim into the run manifest."""

    model_config = ConfigDict(extra="forbid")

    # Corpus
    corpus: Optional[Path] = Field(
        default=None, description="Corpus manifest; a synthetic corpus is used when unset"
    )
    pitchers: int = Field(default=10, ge=2, description="Synthetic corpus size")
    raw: bool = Field(default=False, description="synth: write raw captures instead")
    offset_sd: float = Field(default=1.0, ge=0, description="Synthetic per-pitcher offset SD")
    pitch_noise_sd: float = Field(default=0.5, ge=0, description="Synthetic per-pitch noise SD")

    # Orchestration
    seed: int = Field(default=0, ge=0, description="Base seed")
    workers: int = Field(default=1, ge=1, description="Worker processes")
    out: Optional[Path] = Field(default=None, description="Run directory")

    # Models and training
    grid: str = Field(
        default=SMALLEST_TRANSFORMER.label,
        description="'full' or ';'-separated specs for baseline selection",
    )
    baseline: Optional[str] = Field(
        default=None, description="Spec for analyze1/analyze2, overriding the selected one"
    )
    learning_rate: float = Field(default=0.001, gt=0)
    weight_decay: float = Field(default=1e-4, ge=0)
    max_epochs: int = Field(default=50, ge=1)
    early_stop_r2: float = Field(default=0.90, gt=0, le=1)
    batch_size: int = Field(default=32, ge=1)
    selection_repeats: int = Field(default=1, ge=1)

    # Ablation
    repeats: int = Field(default=2, ge=1, description="Ablation repeats per cell")
    emergence_threshold: float = Field(default=0.25)

    @field_validator("grid")
    @classmethod
    def validate_grid(cls, v: str) -> str:
        try:
            parse_grid(v)
        except ModelConfigError as e:
            raise ValueError(str(e)) from None
        return v

    @field_validator("baseline")
    @classmethod
    def validate_baseline(cls, v: Optional[str]) -> Optional[str]:
        if v is not None:
            try:
                parse_spec(v)
            except ModelConfigError as e:
                raise ValueError(str(e)) from None
        return v

    def model_grid(self) -> list[ModelSpec]:
        return parse_grid(self.grid)

    def baseline_spec(self) -> Optional[ModelSpec]:
        return parse_spec(self.baseline) if self.baseline else None

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            weight_decay=self.weight_decay,
            max_epochs=self.max_epochs,
            early_stop_r2=self.early_stop_r2,
            batch_size=self.batch_size,
            seed=self.seed,
            selection_repeats=self.selection_repeats,
        )

    def synth_config(self) -> SynthConfig:
        return SynthConfig(
            n_pitchers=self.pitchers,
            offset_sd=self.offset_sd,
            pitch_noise_sd=self.pitch_noise_sd,
        )

    def ablation_config(self) -> AblationConfig:
        return AblationConfig(repeats=self.repeats, emergence_threshold=self.emergence_threshold)

    def run_dir(self, settings: Settings) -> Path:
        return self.out if self.out is not None else settings.output_root / "run"


def read_config_file(path: Path) -> dict[str, Optional[str]]:
    """Key/value pairs of a flat config file.

    Raises:
        FileNotFoundError: the file does not exist.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    return dict(dotenv_values(path))


def resolve_config(
    config_file: Optional[Path] = None,
    overrides: Optional[dict[str, Any]] = None,
) -> RunConfig:
    """Merge the config file and non-None CLI overrides into a validated RunConfig.

    Raises:
        ValidationError: unknown keys or out-of-range values.
    """
    values: dict[str, Any] = {}
    if config_file is not None:
        for key, value in read_config_file(config_file).items():
            values[key.strip().lower()] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return RunConfig.model_validate(values)


__all__ = [
    "RunConfig",
    "Settings",
    "read_config_file",
    "resolve_config",
]
