"""Candidate regressors: transformer encoder and GNN-GRU, built on `src.core`."""

from src.models.checkpoint import load_checkpoint, save_checkpoint
from src.models.factory import build_model
from src.models.gnn_gru import GnnGruRegressor, build_gnn_gru
from src.models.graph import SKELETON_EDGES, SkeletonGraph
from src.models.regressor import Regressor, forward
from src.models.specs import (
    FULL_GRID,
    GnnGruSpec,
    ModelSpec,
    TransformerSpec,
    model_spec_adapter,
    parameter_count,
    parse_grid,
    parse_spec,
)
from src.models.transformer import TransformerRegressor, build_transformer

__all__ = [
    "FULL_GRID",
    "GnnGruRegressor",
    "GnnGruSpec",
    "ModelSpec",
    "Regressor",
    "SKELETON_EDGES",
    "SkeletonGraph",
    "TransformerRegressor",
    "TransformerSpec",
    "build_gnn_gru",
    "build_model",
    "build_transformer",
    "forward",
    "load_checkpoint",
    "model_spec_adapter",
    "parameter_count",
    "parse_grid",
    "parse_spec",
    "save_checkpoint",
]
