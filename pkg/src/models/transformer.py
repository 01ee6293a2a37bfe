"""Transformer-encoder regressor.

Per frame the J x 3 coordinates are flattened and embedded to d_l; a
sinusoidal positional encoding is added, then `layers` post-norm encoder
blocks (multi-head self-attention and a ReLU feedforward, each with a
residual connection and layer normalization) run over the sequence. The
sequence is pooled over time and an affine head gives the scalar.
"""

from typing import Optional

import numpy as np

from src.common.errors import ModelConfigError
from src.core.tensor import Tensor, layer_norm, relu, softmax
from src.dataset.models import N_COORDS
from src.models.regressor import Regressor
from src.models.specs import TransformerSpec


def sinusoidal_encoding(n_positions: int, width: int) -> np.ndarray:
    """Fixed positions x width table: sin on even columns, cos on odd."""
    positions = np.arange(n_positions)[:, None]
    pair = (np.arange(width) // 2) * 2
    angles = positions / np.power(10000.0, pair / width)
    table = np.empty((n_positions, width))
    table[:, 0::2] = np.sin(angles[:, 0::2])
    table[:, 1::2] = np.cos(angles[:, 1::2])
    return table


class TransformerRegressor(Regressor):
    architecture = "transformer"

    def __init__(self, spec: TransformerSpec, n_joints: int, n_frames: int, seed: int = 0):
        if spec.d_l % spec.heads:
            raise ModelConfigError(
                f"d_l={spec.d_l} is not divisible by heads={spec.heads}", spec=spec.label
            )
        super().__init__(spec, n_joints, n_frames, seed)
        d, f = spec.d_l, spec.d_f
        self.heads = spec.heads
        self.head_dim = d // spec.heads
        self.use_positional_encoding = spec.positional_encoding
        self.pooling = spec.pooling
        # Attention weights of the most recent forward pass, one array per block
        self.last_attention: list[np.ndarray] = []

        self.weight("embed.w", N_COORDS * n_joints, d)
        self.bias("embed.b", d)
        for i in range(spec.layers):
            for proj in ("q", "k", "v", "o"):
                self.weight(f"block{i}.attn.{proj}.w", d, d)
                self.bias(f"block{i}.attn.{proj}.b", d)
            self.bias(f"block{i}.norm1.gamma", d, 1.0)
            self.bias(f"block{i}.norm1.beta", d)
            self.weight(f"block{i}.ffn.w1", d, f)
            self.bias(f"block{i}.ffn.b1", f)
            self.weight(f"block{i}.ffn.w2", f, d)
            self.bias(f"block{i}.ffn.b2", d)
            self.bias(f"block{i}.norm2.gamma", d, 1.0)
            self.bias(f"block{i}.norm2.beta", d)
        self.weight("head.w", d, 1)
        self.bias("head.b", 1)

    def _attention(self, h: Tensor, i: int) -> Tensor:
        p = self.params
        b, t, d = h.shape
        split = (b, t, self.heads, self.head_dim)

        def project(name: str) -> Tensor:
            x = h @ p[f"block{i}.attn.{name}.w"] + p[f"block{i}.attn.{name}.b"]
            return x.reshape(*split).transpose(0, 2, 1, 3)

        q, k, v = project("q"), project("k"), project("v")
        scores = (q @ k.transpose(0, 1, 3, 2)) * (1.0 / np.sqrt(self.head_dim))
        weights = softmax(scores)
        self.last_attention.append(weights.values.copy())
        context = (weights @ v).transpose(0, 2, 1, 3).reshape(b, t, d)
        return context @ p[f"block{i}.attn.o.w"] + p[f"block{i}.attn.o.b"]

    def _block(self, h: Tensor, i: int) -> Tensor:
        p = self.params
        attended = h + self._attention(h, i)
        h = layer_norm(attended, p[f"block{i}.norm1.gamma"], p[f"block{i}.norm1.beta"])
        hidden = relu(h @ p[f"block{i}.ffn.w1"] + p[f"block{i}.ffn.b1"])
        ffn = hidden @ p[f"block{i}.ffn.w2"] + p[f"block{i}.ffn.b2"]
        return layer_norm(h + ffn, p[f"block{i}.norm2.gamma"], p[f"block{i}.norm2.beta"])

    def _forward(self, batch: np.ndarray) -> Tensor:
        p = self.params
        b, t = batch.shape[:2]
        self.last_attention = []

        x = Tensor(batch.reshape(b, t, -1))
        h = x @ p["embed.w"] + p["embed.b"]
        if self.use_positional_encoding:
            h = h + sinusoidal_encoding(t, self.spec.d_l)
        for i in range(self.spec.layers):
            h = self._block(h, i)

        pooled = h.mean(axis=1) if self.pooling == "mean" else h[:, -1, :]
        return (pooled @ p["head.w"] + p["head.b"]).reshape(b)


def build_transformer(
    spec: TransformerSpec, n_joints: int, n_frames: int, seed: int = 0
) -> TransformerRegressor:
    return TransformerRegressor(spec, n_joints, n_frames, seed)


def attention_rows(model: TransformerRegressor) -> Optional[np.ndarray]:
    """Row sums of every attention matrix from the last forward pass."""
    if not model.last_attention:
        return None
    return np.concatenate([w.sum(axis=-1).reshape(-1) for w in model.last_attention])
