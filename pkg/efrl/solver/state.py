"""Physical parameters and the state carried from step to step."""

from __future__ import annotations

__all__ = ["FluidParams", "SolverState"]

from dataclasses import dataclass, replace

import numpy as np

from ..constants import BLOW_UP_FACTOR
from ..fields.grid import VelocityField
from ..metrics.diagnostics import kinetic_energy


@dataclass(frozen=True)
class FluidParams:
    """Viscosity and time step of a run.

    Velocities and lengths are scaled to one, so ``re == 1 / nu``.
    """

    nu: float
    """Kinematic viscosity."""

    dt: float
    """Time step."""

    def __post_init__(self) -> None:
        if not self.nu > 0:
            raise ValueError(f"Viscosity must be positive, got {self.nu}")
        if not self.dt > 0:
            raise ValueError(f"Time step must be positive, got {self.dt}")

    @classmethod
    def from_reynolds(cls, re: float, dt: float) -> FluidParams:
        if not re > 0:
            raise ValueError(f"Reynolds number must be positive, got {re}")
        return cls(1.0 / re, dt)

    @property
    def re(self) -> float:
        return 1.0 / self.nu

    def with_dt(self, dt: float) -> FluidParams:
        return replace(self, dt=dt)


@dataclass(frozen=True)
class SolverState:
    """A velocity field at step ``step_index`` and time ``t``.

    ``blown_up`` is set once the field holds non-finite values or its kinetic
    energy exceeds ``BLOW_UP_FACTOR`` times ``initial_energy``. A blown-up state
    is terminal.
    """

    u: VelocityField
    t: float = 0.0
    step_index: int = 0
    blown_up: bool = False
    initial_energy: float = 0.0

    @classmethod
    def initial(cls, u: VelocityField, t: float = 0.0, step_index: int = 0) -> SolverState:
        """Start a run from ``u``; its energy becomes the blow-up baseline."""
        return cls(u, t, step_index, False, kinetic_energy(u))

    def advance(self, u: VelocityField, dt: float) -> SolverState:
        """The state one step later holding ``u``, flagged if ``u`` blew up."""
        blown_up = not u.is_finite()
        if not blown_up:
            with np.errstate(over="ignore"):
                blown_up = kinetic_energy(u) > BLOW_UP_FACTOR * self.initial_energy
        return replace(
            self,
            u=u,
            t=self.t + dt,
            step_index=self.step_index + 1,
            blown_up=blown_up,
        )

    def blow_up(self, dt: float) -> SolverState:
        """The terminal state reached when a step could not be completed."""
        nan_field = VelocityField.from_stacked(
            self.u.grid, np.full((2, *self.u.grid.shape), np.nan)
        )
        return replace(
            self,
            u=nan_field,
            t=self.t + dt,
            step_index=self.step_index + 1,
            blown_up=True,
        )
