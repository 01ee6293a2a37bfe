"""Graph-convolution + GRU regressor.

Per frame, `gnn_layers` rounds of H <- ReLU(A_hat H W) mix joint features
over the skeleton graph (H starts as the joint coordinates). The node
features of each frame are concatenated and fed to a GRU whose final state
goes through an affine head.

GRU update (state h, input x):

    z = sigmoid(x W_z + h U_z + b_z)
    r = sigmoid(x W_r + h U_r + b_r)
    n = tanh(x W_n + r * (h U_n) + b_n)
    h' = (1 - z) * n + z * h
"""

from typing import Optional

import numpy as np

from src.common.errors import ModelConfigError
from src.core.tensor import Tensor, relu, sigmoid, tanh
from src.dataset.models import JOINT_ORDER, N_COORDS, JointId
from src.models.graph import SkeletonGraph
from src.models.regressor import Regressor
from src.models.specs import GnnGruSpec


class GnnGruRegressor(Regressor):
    architecture = "gnn_gru"

    def __init__(
        self,
        spec: GnnGruSpec,
        graph: SkeletonGraph,
        n_frames: int,
        seed: int = 0,
    ):
        if graph.n_joints < 1:
            raise ModelConfigError("induced subgraph is empty")
        super().__init__(spec, graph.n_joints, n_frames, seed)
        self.graph = graph
        self.propagation = Tensor(graph.propagation)
        # Test hook: r = 1 and z = 0 turn the cell into an Elman recurrence
        self.force_gates_open = False

        hidden = spec.hidden_units
        width = N_COORDS
        for i in range(spec.gnn_layers):
            self.weight(f"gnn{i}.w", width, hidden)
            width = hidden

        frame_width = graph.n_joints * hidden
        for gate in ("z", "r", "n"):
            self.weight(f"gru.w_{gate}", frame_width, hidden)
            self.weight(f"gru.u_{gate}", hidden, hidden)
            self.bias(f"gru.b_{gate}", hidden)
        self.weight("head.w", hidden, 1)
        self.bias("head.b", 1)

    def frame_features(self, batch: np.ndarray) -> Tensor:
        """Graph-convolved node features, B x T x (J * hidden)."""
        b, t = batch.shape[:2]
        h = Tensor(batch)
        for i in range(self.spec.gnn_layers):
            h = relu(self.propagation @ h @ self.params[f"gnn{i}.w"])
        return h.reshape(b, t, -1)

    def _forward(self, batch: np.ndarray) -> Tensor:
        p = self.params
        b, t = batch.shape[:2]
        feats = self.frame_features(batch)

        xz = feats @ p["gru.w_z"] + p["gru.b_z"]
        xr = feats @ p["gru.w_r"] + p["gru.b_r"]
        xn = feats @ p["gru.w_n"] + p["gru.b_n"]

        h = Tensor(np.zeros((b, self.spec.hidden_units)))
        for step in range(t):
            candidate_in = xn[:, step, :]
            if self.force_gates_open:
                h = tanh(candidate_in + h @ p["gru.u_n"])
                continue
            z = sigmoid(xz[:, step, :] + h @ p["gru.u_z"])
            r = sigmoid(xr[:, step, :] + h @ p["gru.u_r"])
            n = tanh(candidate_in + r * (h @ p["gru.u_n"]))
            h = (1.0 - z) * n + z * h

        return (h @ p["head.w"] + p["head.b"]).reshape(b)


def build_gnn_gru(
    spec: GnnGruSpec,
    graph: Optional[SkeletonGraph] = None,
    joints: Optional[tuple[JointId, ...]] = None,
    n_frames: int = 101,
    seed: int = 0,
) -> GnnGruRegressor:
    """GNN-GRU over the subgraph induced by `joints` (all joints by default).

    Raises:
        ModelConfigError: the induced subgraph is empty.
    """
    graph = graph or SkeletonGraph(normalization=spec.normalization)
    joints = tuple(JOINT_ORDER) if joints is None else joints
    if joints != graph.joints:
        graph = graph.induced(joints)
    return GnnGruRegressor(spec, graph, n_frames, seed)
