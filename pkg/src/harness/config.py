"""Training contract shared by every evaluation."""

from typing import Literal

from pydantic import BaseModel, Field


class TrainConfig(BaseModel):
    """Optimizer, stopping rule and standardization for one model training."""

    learning_rate: float = Field(default=0.001, gt=0, description="Adam step size")
    weight_decay: float = Field(default=1e-4, ge=0, description="Coupled L2 coefficient")
    max_epochs: int = Field(default=50, ge=1, description="Epoch cap")
    early_stop_r2: float = Field(
        default=0.90, gt=0, le=1, description="Stop once train-set R^2 exceeds this"
    )
    batch_size: int = Field(default=32, ge=1, description="Minibatch size, reshuffled per epoch")
    seed: int = Field(default=0, ge=0, description="Base seed for folds and repeats")
    input_standardization: Literal["channel", "none"] = Field(
        default="channel", description="Per joint-coordinate z-score from training data"
    )
    standardize_target: bool = Field(default=True)
    selection_repeats: int = Field(
        default=1, ge=1, description="LOSOCV runs per spec during baseline selection"
    )
