"""Time series and spectrum files of a rollout."""

from __future__ import annotations

__all__ = ["TimeSeries", "write_timeseries", "write_spectrum", "spectrum_file_name"]

from dataclasses import dataclass, field
from pathlib import Path

from ..fields.grid import VelocityField
from ..fields.operators import grad_norm
from ..utils.file_ops import write_csv
from .diagnostics import SpectrumStats, enstrophy, kinetic_energy

TIMESERIES_HEADER = ("t", "energy", "enstrophy", "grad_norm", "delta")
SPECTRUM_HEADER = ("kappa", "energy")


@dataclass
class TimeSeries:
    """Scalar diagnostics recorded along a rollout."""

    t: list[float] = field(default_factory=list)
    energy: list[float] = field(default_factory=list)
    enstrophy: list[float] = field(default_factory=list)
    grad_norm: list[float] = field(default_factory=list)
    delta: list[float] = field(default_factory=list)
    """Filter radius applied to reach each time; ``nan`` when none was."""

    def record(self, t: float, u: VelocityField, delta: float = float("nan")) -> None:
        self.t.append(t)
        self.energy.append(kinetic_energy(u))
        self.enstrophy.append(enstrophy(u))
        self.grad_norm.append(grad_norm(u))
        self.delta.append(delta)

    def __len__(self) -> int:
        return len(self.t)

    def rows(self) -> list[tuple[float, ...]]:
        return list(zip(self.t, self.energy, self.enstrophy, self.grad_norm, self.delta))


def spectrum_file_name(t: float) -> str:
    return f"spectrum_t{t:.3f}.csv"


def write_timeseries(path: Path, series: TimeSeries) -> Path:
    return write_csv(path, TIMESERIES_HEADER, series.rows())


def write_spectrum(directory: Path, stats: SpectrumStats) -> Path:
    """Write the resolved shells of ``stats`` into ``directory``."""
    resolved = stats.resolved()
    rows = zip(resolved.kappa.tolist(), resolved.energy.tolist())
    return write_csv(Path(directory) / spectrum_file_name(stats.time), SPECTRUM_HEADER, rows)
