"""Anatomical skeleton graph over the 15 joints."""

from collections.abc import Iterable, Sequence
from typing import Literal, Optional

import numpy as np

from src.common.errors import ModelConfigError
from src.dataset.models import JOINT_ORDER, JointId

Normalization = Literal["symmetric", "row"]

SKELETON_EDGES: tuple[tuple[JointId, JointId], ...] = (
    (JointId.HEAD, JointId.L_SHOULDER),
    (JointId.HEAD, JointId.R_SHOULDER),
    (JointId.L_SHOULDER, JointId.R_SHOULDER),
    (JointId.L_SHOULDER, JointId.L_ELBOW),
    (JointId.R_SHOULDER, JointId.R_ELBOW),
    (JointId.L_ELBOW, JointId.L_WRIST),
    (JointId.R_ELBOW, JointId.R_WRIST),
    (JointId.L_SHOULDER, JointId.L_HIP),
    (JointId.R_SHOULDER, JointId.R_HIP),
    (JointId.L_HIP, JointId.R_HIP),
    (JointId.L_HIP, JointId.L_KNEE),
    (JointId.R_HIP, JointId.R_KNEE),
    (JointId.L_KNEE, JointId.L_HEEL),
    (JointId.R_KNEE, JointId.R_HEEL),
    (JointId.L_HEEL, JointId.L_TOE),
    (JointId.R_HEEL, JointId.R_TOE),
)


class SkeletonGraph:
    """Undirected joint graph with self-loops and its propagation matrix.

    `normalization="symmetric"` gives D^-1/2 (A + I) D^-1/2;
    `normalization="row"` gives D^-1 (A + I), whose rows sum to 1.
    """

    def __init__(
        self,
        joints: Sequence[JointId] = tuple(JOINT_ORDER),
        edges: Iterable[tuple[JointId, JointId]] = SKELETON_EDGES,
        normalization: Normalization = "symmetric",
    ):
        self.joints: tuple[JointId, ...] = tuple(joints)
        if not self.joints:
            raise ModelConfigError("skeleton graph needs at least one joint")
        if normalization not in ("symmetric", "row"):
            raise ModelConfigError(f"unknown normalization {normalization!r}")
        self.normalization = normalization
        self.edges = tuple(
            (a, b) for a, b in edges if a in self.joints and b in self.joints and a != b
        )

        n = len(self.joints)
        index = {j: i for i, j in enumerate(self.joints)}
        adjacency = np.eye(n)
        for a, b in self.edges:
            adjacency[index[a], index[b]] = 1.0
            adjacency[index[b], index[a]] = 1.0
        self.adjacency = adjacency

        degree = adjacency.sum(axis=1)
        if normalization == "symmetric":
            inv_sqrt = 1.0 / np.sqrt(degree)
            self.propagation = inv_sqrt[:, None] * adjacency * inv_sqrt[None, :]
        else:
            self.propagation = adjacency / degree[:, None]

    @property
    def n_joints(self) -> int:
        return len(self.joints)

    def induced(
        self, joints: Sequence[JointId], normalization: Optional[Normalization] = None
    ) -> "SkeletonGraph":
        """Subgraph on `joints` (kept in their given order), renormalized.

        Raises:
            ModelConfigError: empty joint set or joints outside this graph.
        """
        if not joints:
            raise ModelConfigError("induced subgraph is empty")
        outside = [j.value for j in joints if j not in self.joints]
        if outside:
            raise ModelConfigError(f"joints {outside} are not in the graph", joints=outside)
        return SkeletonGraph(joints, self.edges, normalization or self.normalization)

    def __repr__(self) -> str:
        return (
            f"SkeletonGraph(joints={len(self.joints)}, edges={len(self.edges)}, "
            f"normalization={self.normalization!r})"
        )
