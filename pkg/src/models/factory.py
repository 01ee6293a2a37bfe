"""Build a regressor from a spec and the restricted input dimensions."""

from typing import Optional

from src.dataset.models import JOINT_ORDER, JointId
from src.models.gnn_gru import build_gnn_gru
from src.models.graph import SkeletonGraph
from src.models.regressor import Regressor
from src.models.specs import GnnGruSpec, ModelSpec, TransformerSpec
from src.models.transformer import build_transformer


def build_model(
    spec: ModelSpec,
    joints: Optional[tuple[JointId, ...]] = None,
    n_frames: int = 101,
    seed: int = 0,
    graph: Optional[SkeletonGraph] = None,
) -> Regressor:
    """Fresh, seeded model for inputs over `joints` and `n_frames` frames."""
    joints = tuple(JOINT_ORDER) if joints is None else tuple(joints)
    if isinstance(spec, TransformerSpec):
        return build_transformer(spec, len(joints), n_frames, seed)
    if isinstance(spec, GnnGruSpec):
        return build_gnn_gru(spec, graph, joints, n_frames, seed)
    raise TypeError(f"unsupported model spec {type(spec).__name__}")
