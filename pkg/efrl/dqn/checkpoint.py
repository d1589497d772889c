"""Binary checkpoints of a Q-network and its optimizer.

Layout, little-endian throughout: magic ``"EFDQ"``, version u32, the number of
layer sizes u32 followed by the sizes as u32, every weight matrix and bias
vector as row-major f64, the Adam step counter u64 and both moment sets in the
same order, then the length u32 of a UTF-8 ``key=value`` metadata block and
the block itself.
"""

from __future__ import annotations

__all__ = ["checkpoint_save", "checkpoint_load"]

import struct
from pathlib import Path
from typing import Any

import numpy as np

from .. import logger
from ..constants import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from ..typing import StrPath
from ..utils.exceptions import CheckpointError
from ..utils.file_ops import guarantee_existence
from .adam import AdamState
from .network import MlpParams

_HEAD = struct.Struct("<4sII")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")


def _shapes(sizes: list[int]) -> list[tuple[int, ...]]:
    shapes = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        shapes.extend([(fan_in, fan_out), (fan_out,)])
    return shapes


def checkpoint_save(
    path: StrPath,
    params: MlpParams,
    adam: AdamState,
    metadata: dict[str, Any] | None = None,
) -> Path:
    path = Path(path)
    guarantee_existence(path.parent)
    sizes = params.layer_sizes
    chunks = [_HEAD.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(sizes))]
    chunks.extend(_U32.pack(s) for s in sizes)
    chunks.extend(a.astype("<f8").tobytes(order="C") for a in params.arrays())
    chunks.append(_U64.pack(adam.step))
    chunks.extend(a.astype("<f8").tobytes(order="C") for a in adam.m.arrays())
    chunks.extend(a.astype("<f8").tobytes(order="C") for a in adam.v.arrays())
    text = "".join(f"{k}={v}\n" for k, v in (metadata or {}).items()).encode()
    chunks.append(_U32.pack(len(text)))
    chunks.append(text)
    path.write_bytes(b"".join(chunks))
    logger.debug("Wrote checkpoint %(path)s", {"path": path})
    return path


class _Reader:
    def __init__(self, data: bytes, path: Path) -> None:
        self.data = data
        self.path = path
        self.offset = 0

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.data):
            raise CheckpointError(f"{self.path}: truncated checkpoint")
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: struct.Struct) -> tuple:
        return fmt.unpack(self.take(fmt.size))

    def array(self, shape: tuple[int, ...]) -> np.ndarray:
        count = int(np.prod(shape))
        raw = self.take(8 * count)
        return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(shape)


def checkpoint_load(
    path: StrPath,
    expected_sizes: list[int] | None = None,
) -> tuple[MlpParams, AdamState, dict[str, str]]:
    """Read a checkpoint written by :func:`checkpoint_save`.

    Parameters
    ----------
    path
        The checkpoint file.
    expected_sizes
        When given, the layer sizes the network must have.

    Returns
    -------
    tuple[:class:`~.MlpParams`, :class:`~.AdamState`, dict[str, str]]
        Network, optimizer state and metadata.

    Raises
    ------
    :class:`~.CheckpointError`
        On a wrong magic or version, truncation, trailing bytes or unexpected
        layer sizes.
    """
    path = Path(path)
    reader = _Reader(path.read_bytes(), path)
    magic, version, n_sizes = reader.unpack(_HEAD)
    if magic != CHECKPOINT_MAGIC:
        raise CheckpointError(f"{path}: not a Q-network checkpoint")
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    if n_sizes < 2:
        raise CheckpointError(f"{path}: a network needs at least two layer sizes")
    sizes = [reader.unpack(_U32)[0] for _ in range(n_sizes)]
    if expected_sizes is not None and sizes != list(expected_sizes):
        raise CheckpointError(
            f"{path}: network has layer sizes {sizes}, expected {list(expected_sizes)}"
        )
    shapes = _shapes(sizes)
    params = MlpParams.from_arrays([reader.array(s) for s in shapes])
    (step,) = reader.unpack(_U64)
    m = MlpParams.from_arrays([reader.array(s) for s in shapes])
    v = MlpParams.from_arrays([reader.array(s) for s in shapes])
    (length,) = reader.unpack(_U32)
    text = reader.take(length).decode()
    if reader.offset != len(reader.data):
        raise CheckpointError(f"{path}: unexpected trailing bytes")
    metadata = {}
    for line in text.splitlines():
        key, _, value = line.partition("=")
        metadata[key] = value
    return params, AdamState(m, v, step), metadata
