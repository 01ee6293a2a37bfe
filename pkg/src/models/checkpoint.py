"""Flat named-tensor checkpoints.

Binary layout, all integers little-endian:

    magic      4 bytes  b"PBCK"
    version    uint32   1
    count      uint32   number of tensors
    count x    name table entry:
                 uint16 name length, UTF-8 name,
                 uint8 ndim, ndim x uint32 dims
    payloads   float64 little-endian, C order, in name-table order
"""

import struct
from pathlib import Path

import numpy as np

from src.common.errors import ModelConfigError
from src.models.regressor import Regressor

MAGIC = b"PBCK"
VERSION = 1


def encode_tensors(tensors: dict[str, np.ndarray]) -> bytes:
    header = [MAGIC, struct.pack("<II", VERSION, len(tensors))]
    payloads = []
    for name, values in tensors.items():
        encoded = name.encode("utf-8")
        arr = np.ascontiguousarray(values, dtype="<f8")
        header.append(struct.pack("<H", len(encoded)) + encoded)
        header.append(struct.pack(f"<B{arr.ndim}I", arr.ndim, *arr.shape))
        payloads.append(arr.tobytes(order="C"))
    return b"".join(header + payloads)


def decode_tensors(blob: bytes) -> dict[str, np.ndarray]:
    """Inverse of `encode_tensors`.

    Raises:
        ModelConfigError: bad magic, unknown version or truncated data.
    """
    if blob[:4] != MAGIC:
        raise ModelConfigError("not a checkpoint (bad magic)")
    try:
        version, count = struct.unpack_from("<II", blob, 4)
        if version != VERSION:
            raise ModelConfigError(f"unsupported checkpoint version {version}")
        offset = 12
        table = []
        for _ in range(count):
            (length,) = struct.unpack_from("<H", blob, offset)
            offset += 2
            name = blob[offset : offset + length].decode("utf-8")
            offset += length
            (ndim,) = struct.unpack_from("<B", blob, offset)
            offset += 1
            shape = struct.unpack_from(f"<{ndim}I", blob, offset)
            offset += 4 * ndim
            table.append((name, shape))

        tensors = {}
        for name, shape in table:
            size = int(np.prod(shape, dtype=np.int64))
            end = offset + 8 * size
            if end > len(blob):
                raise ModelConfigError(f"checkpoint truncated in tensor {name!r}")
            flat = np.frombuffer(blob, dtype="<f8", count=size, offset=offset)
            tensors[name] = flat.reshape(shape).copy()
            offset = end
    except struct.error as e:
        raise ModelConfigError(f"checkpoint truncated ({e})") from e
    return tensors


def save_checkpoint(model: Regressor, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_file = path.with_suffix(path.suffix + ".tmp")
    temp_file.write_bytes(encode_tensors(model.state()))
    temp_file.replace(path)


def load_checkpoint(model: Regressor, path: Path) -> Regressor:
    """Load parameters saved by `save_checkpoint` into a model of the same spec."""
    model.load_state(decode_tensors(Path(path).read_bytes()))
    return model
