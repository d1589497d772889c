"""Filtered-DNS velocity fields at every coarse step of a window.

On disk a store is a directory of snapshot files ``step_000000``,
``step_000001``... and a ``manifest`` of ``key=value`` lines giving ``n``,
``side``, ``dt`` and ``count``, the number of steps after the initial one.
"""

from __future__ import annotations

__all__ = ["ReferenceStore"]

from dataclasses import dataclass, field
from pathlib import Path

from tqdm import tqdm

from .. import logger
from ..constants import MISSING_REFERENCES_MESSAGE, REFERENCE_MANIFEST, SNAPSHOT_NAME_FORMAT
from ..fields.grid import GridSpec, VelocityField
from ..fields.snapshot import load_snapshot, save_snapshot
from ..typing import StrPath
from ..utils.exceptions import ConfigurationError, GridMismatchError, SnapshotFormatError
from ..utils.file_ops import guarantee_existence


@dataclass
class ReferenceStore:
    grid: GridSpec
    dt: float
    snapshots: list[VelocityField] = field(default_factory=list)
    """``snapshots[k]`` is the reference at step ``k``, time ``k * dt``."""

    @property
    def count(self) -> int:
        return len(self.snapshots) - 1

    def append(self, u: VelocityField) -> None:
        if u.grid != self.grid:
            raise GridMismatchError(f"Reference on {u.grid} does not fit store on {self.grid}")
        self.snapshots.append(u)

    def covers(self, step: int) -> bool:
        return 0 <= step <= self.count

    def __getitem__(self, step: int) -> VelocityField:
        if not self.covers(step):
            raise IndexError(f"No reference for step {step}; the store ends at {self.count}")
        return self.snapshots[step]

    def __len__(self) -> int:
        return len(self.snapshots)

    def require(self, variant_name: str, last_step: int) -> None:
        """Raise :class:`~.ConfigurationError` unless steps ``0..last_step`` are held."""
        if not self.covers(last_step):
            raise ConfigurationError(
                MISSING_REFERENCES_MESSAGE.format(
                    variant_name, last_step, f"the store ends at step {self.count}"
                )
            )

    def save(self, directory: StrPath, progress: bool = False) -> Path:
        directory = guarantee_existence(Path(directory))
        logger.info(
            "Writing %(count)s references to %(dir)s",
            {"count": len(self), "dir": directory},
        )
        for k, u in enumerate(tqdm(self.snapshots, desc="Writing", disable=not progress)):
            save_snapshot(directory / SNAPSHOT_NAME_FORMAT.format(k), u, k * self.dt)
        manifest = {
            "n": self.grid.n,
            "side": repr(self.grid.side),
            "dt": repr(self.dt),
            "count": self.count,
        }
        (directory / REFERENCE_MANIFEST).write_text(
            "".join(f"{k}={v}\n" for k, v in manifest.items())
        )
        return directory

    @classmethod
    def load(cls, directory: StrPath, progress: bool = False) -> ReferenceStore:
        """Read a store written by :meth:`save`.

        Raises
        ------
        :class:`~.ConfigurationError`
            If the directory has no manifest.
        :class:`~.SnapshotFormatError`
            If the manifest is malformed or a snapshot is missing, unreadable or
            on another grid.
        """
        directory = Path(directory)
        manifest_path = directory / REFERENCE_MANIFEST
        if not manifest_path.exists():
            raise ConfigurationError(f"No reference manifest in {directory}")
        entries = {}
        for line in manifest_path.read_text().splitlines():
            if line.strip():
                key, _, value = line.partition("=")
                entries[key.strip()] = value.strip()
        try:
            grid = GridSpec(int(entries["n"]), float(entries["side"]))
            dt = float(entries["dt"])
            count = int(entries["count"])
        except (KeyError, ValueError) as e:
            raise SnapshotFormatError(f"{manifest_path}: malformed manifest") from e

        logger.info("Reading %(count)s references from %(dir)s", {"count": count + 1, "dir": directory})
        store = cls(grid, dt)
        for k in tqdm(range(count + 1), desc="Reading", disable=not progress):
            path = directory / SNAPSHOT_NAME_FORMAT.format(k)
            if not path.exists():
                raise SnapshotFormatError(f"Missing reference snapshot {path}")
            u, _ = load_snapshot(path)
            if u.grid != grid:
                raise SnapshotFormatError(f"{path}: snapshot on {u.grid}, manifest says {grid}")
            store.append(u)
        return store
