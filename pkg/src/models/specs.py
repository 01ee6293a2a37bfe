"""Model specifications, the candidate grid and closed-form parameter counts."""

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from src.common.errors import ModelConfigError


class TransformerSpec(BaseModel):
    """Stacked transformer encoders over per-frame joint features."""

    model_config = ConfigDict(frozen=True)

    architecture: Literal["transformer"] = "transformer"
    heads: int = Field(gt=0, description="Attention heads")
    d_l: int = Field(gt=0, description="Latent dimension")
    d_f: int = Field(gt=0, description="Feedforward dimension")
    layers: int = Field(default=3, gt=0, description="Encoder blocks")
    pooling: Literal["mean", "last"] = Field(default="mean", description="Temporal pooling")
    positional_encoding: bool = Field(default=True, description="Add sinusoidal positions")

    @model_validator(mode="after")
    def check_heads(self) -> "TransformerSpec":
        if self.d_l % self.heads:
            raise ValueError(f"d_l={self.d_l} is not divisible by heads={self.heads}")
        return self

    @property
    def label(self) -> str:
        return f"transformer:{self.heads},{self.d_l},{self.d_f}"


class GnnGruSpec(BaseModel):
    """Graph convolution per frame followed by a GRU over frames."""

    model_config = ConfigDict(frozen=True)

    architecture: Literal["gnn_gru"] = "gnn_gru"
    gnn_layers: int = Field(gt=0, description="Graph-convolution rounds")
    hidden_units: int = Field(gt=0, description="Node feature width and GRU state size")
    normalization: Literal["symmetric", "row"] = Field(default="symmetric")

    @property
    def label(self) -> str:
        return f"gnn_gru:{self.gnn_layers},{self.hidden_units}"


ModelSpec = Annotated[Union[TransformerSpec, GnnGruSpec], Field(discriminator="architecture")]
model_spec_adapter: TypeAdapter[ModelSpec] = TypeAdapter(ModelSpec)

FULL_GRID: list[ModelSpec] = [
    TransformerSpec(heads=2, d_l=32, d_f=64),
    TransformerSpec(heads=2, d_l=64, d_f=128),
    TransformerSpec(heads=4, d_l=64, d_f=128),
    TransformerSpec(heads=4, d_l=128, d_f=256),
    TransformerSpec(heads=8, d_l=128, d_f=256),
    TransformerSpec(heads=8, d_l=256, d_f=512),
    GnnGruSpec(gnn_layers=2, hidden_units=32),
    GnnGruSpec(gnn_layers=2, hidden_units=64),
    GnnGruSpec(gnn_layers=2, hidden_units=128),
    GnnGruSpec(gnn_layers=3, hidden_units=32),
    GnnGruSpec(gnn_layers=3, hidden_units=64),
    GnnGruSpec(gnn_layers=3, hidden_units=128),
]

SMALLEST_TRANSFORMER = FULL_GRID[0]


def parse_spec(text: str) -> ModelSpec:
    """One spec from its label, e.g. ``transformer:4,64,128`` or ``gnn_gru:2,64``."""
    arch, _, args = text.strip().partition(":")
    try:
        values = [int(v) for v in args.split(",")] if args else []
    except ValueError:
        raise ModelConfigError(f"non-integer model arguments in {text!r}") from None
    try:
        if arch == "transformer" and len(values) == 3:
            return TransformerSpec(heads=values[0], d_l=values[1], d_f=values[2])
        if arch == "gnn_gru" and len(values) == 2:
            return GnnGruSpec(gnn_layers=values[0], hidden_units=values[1])
    except ValidationError as e:
        raise ModelConfigError(f"invalid model spec {text!r}: {e.errors()[0]['msg']}") from e
    raise ModelConfigError(
        f"cannot parse model spec {text!r}; expected transformer:h,d_l,d_f or gnn_gru:layers,units"
    )


def parse_grid(text: str) -> list[ModelSpec]:
    """Grid from ``full`` or ``;``-separated spec labels."""
    text = text.strip()
    if text in ("", "full"):
        return list(FULL_GRID)
    specs = [parse_spec(part) for part in text.split(";") if part.strip()]
    if not specs:
        raise ModelConfigError("model grid is empty")
    return specs


def parameter_count(spec: ModelSpec, n_joints: int, n_frames: int) -> int:
    """Number of trainable scalars of the model built from `spec` for J joints.

    Neither family has frame-dependent parameters; `n_frames` is accepted so
    the count is stated as a function of the full input shape.
    """
    del n_frames
    if isinstance(spec, TransformerSpec):
        d, f = spec.d_l, spec.d_f
        embed = 3 * n_joints * d + d
        attention = 4 * (d * d + d)
        feedforward = d * f + f + f * d + d
        norms = 2 * (2 * d)
        head = d + 1
        return embed + spec.layers * (attention + feedforward + norms) + head
    h = spec.hidden_units
    graph = 3 * h + (spec.gnn_layers - 1) * h * h
    gru = 3 * (n_joints * h * h + h * h + h)
    return graph + gru + h + 1
