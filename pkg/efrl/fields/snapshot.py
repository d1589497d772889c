"""Binary velocity snapshots.

Layout: a little-endian header ``magic "EFRL", version u32, n u32, side f64,
time f64`` followed by ``ux`` then ``uy`` as row-major little-endian f64.
"""

from __future__ import annotations

__all__ = ["save_snapshot", "load_snapshot"]

import struct
from pathlib import Path

import numpy as np

from ..constants import SNAPSHOT_MAGIC, SNAPSHOT_VERSION
from ..typing import StrPath
from ..utils.exceptions import SnapshotFormatError
from .grid import GridSpec, VelocityField

_HEADER = struct.Struct("<4sIIdd")


def save_snapshot(path: StrPath, u: VelocityField, time: float) -> Path:
    path = Path(path)
    header = _HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, u.grid.n, u.grid.side, time)
    with path.open("wb") as handle:
        handle.write(header)
        handle.write(u.stacked.astype("<f8").tobytes(order="C"))
    return path


def load_snapshot(path: StrPath) -> tuple[VelocityField, float]:
    """Read a snapshot written by :func:`save_snapshot`.

    Returns
    -------
    tuple[:class:`~.VelocityField`, float]
        The field and its time stamp.

    Raises
    ------
    :class:`~.SnapshotFormatError`
        On a wrong magic, an unknown version or a truncated payload.
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise SnapshotFormatError(f"{path}: truncated header")
    magic, version, n, side, time = _HEADER.unpack_from(data)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path}: not a velocity snapshot")
    if version != SNAPSHOT_VERSION:
        raise SnapshotFormatError(f"{path}: unsupported snapshot version {version}")
    expected = _HEADER.size + 2 * n * n * 8
    if len(data) != expected:
        raise SnapshotFormatError(
            f"{path}: expected {expected} bytes for a {n}x{n} field, found {len(data)}"
        )
    values = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(2, n, n)
    grid = GridSpec(n, side)
    return VelocityField.from_stacked(grid, values.astype(np.float64)), time
