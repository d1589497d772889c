"""The Evolve and Filter steps.

Both act mode by mode on the Fourier coefficients of the velocity. Evolve
treats advection explicitly and diffusion implicitly::

    w = P (u - dt * A(u)) / (1 + nu * dt * |k|^2)

where ``A`` is the dealiased ``(u . grad) u`` and ``P`` the Leray projector,
which also takes the place of the pressure. The Stokes differential filter is::

    u = P w / (1 + 2 delta^2 |k|^2)

so its divergence multiplier never has to be formed.

The reference DNS does not use a single evolve step: :func:`dns_step` combines
three of them into a third-order strong-stability-preserving Runge-Kutta step.
"""

from __future__ import annotations

__all__ = [
    "evolve_step",
    "differential_filter",
    "ef_step",
    "noef_step",
    "dns_step",
    "kolmogorov_scale",
]

import numpy as np

from ..fields.grid import VelocityField
from ..fields.operators import advection_hat, project_hat, velocity_from_hat, velocity_hat
from ..utils.exceptions import BlowUpError
from .state import FluidParams, SolverState


def evolve_step(u_n: VelocityField, p: FluidParams) -> VelocityField:
    """Advance ``u_n`` by one time step of the unfiltered equations.

    The result may hold non-finite values when the step overflows; callers that
    need a flag use :func:`noef_step` or :func:`ef_step`.

    Raises
    ------
    :class:`~.BlowUpError`
        If ``u_n`` is not finite.
    """
    grid = u_n.grid
    u_hat = velocity_hat(u_n)
    with np.errstate(over="ignore", invalid="ignore"):
        rhs = u_hat - p.dt * advection_hat(grid, u_hat)
        w_hat = project_hat(grid, rhs) / (1.0 + p.nu * p.dt * grid.k_squared)
        return velocity_from_hat(grid, w_hat)


def differential_filter(w: VelocityField, delta: float) -> VelocityField:
    """Apply the Stokes differential filter of radius ``delta``.

    ``delta = 0`` reduces to the Leray projection.

    Raises
    ------
    :class:`ValueError`
        If ``delta`` is negative.
    :class:`~.BlowUpError`
        If ``w`` is not finite.

    Examples
    --------
    ::

        >>> grid = GridSpec(16)
        >>> w = VelocityField.from_function(grid, lambda x, y: (0 * x, np.sin(2 * np.pi * x)))
        >>> ratio = differential_filter(w, 1e-3).uy.values.max() / w.uy.values.max()
        >>> bool(np.isclose(ratio, 1 / (1 + 2e-6 * (2 * np.pi) ** 2)))
        True
    """
    if delta < 0:
        raise ValueError(f"Filter radius must be non-negative, got {delta}")
    grid = w.grid
    transfer = 1.0 / (1.0 + 2.0 * delta**2 * grid.k_squared)
    return velocity_from_hat(grid, project_hat(grid, velocity_hat(w)) * transfer)


def _step(state: SolverState, p: FluidParams, delta: float | None) -> SolverState:
    if state.blown_up:
        raise ValueError("Cannot step a blown-up state")
    try:
        u = evolve_step(state.u, p)
        if delta is not None:
            u = differential_filter(u, delta)
    except BlowUpError:
        return state.blow_up(p.dt)
    return state.advance(u, p.dt)


def ef_step(state: SolverState, delta: float, p: FluidParams) -> SolverState:
    """Evolve, then filter with radius ``delta``.

    Instability does not raise: the returned state has ``blown_up`` set.
    """
    if delta < 0:
        raise ValueError(f"Filter radius must be non-negative, got {delta}")
    return _step(state, p, delta)


def noef_step(state: SolverState, p: FluidParams) -> SolverState:
    """Evolve only, with no regularization."""
    return _step(state, p, None)


def dns_step(state: SolverState, p: FluidParams) -> SolverState:
    """One step of the fine-grid reference run.

    Three :func:`evolve_step` stages in Shu-Osher form::

        u1 = E(u)
        u2 = 3/4 u + 1/4 E(u1)
        u3 = 1/3 u + 2/3 E(u2)

    For advection this is the third-order SSP Runge-Kutta scheme, whose
    stability region contains the imaginary axis up to ``sqrt(3)``; a single
    explicit evolve step amplifies every advected mode. Diffusion stays implicit
    in each stage, and every stage is divergence-free, so ``u3`` is too.

    Instability does not raise: the returned state has ``blown_up`` set.
    """
    if state.blown_up:
        raise ValueError("Cannot step a blown-up state")
    u = state.u
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            u1 = evolve_step(u, p)
            u2 = 0.75 * u + 0.25 * evolve_step(u1, p)
            u3 = u * (1.0 / 3.0) + (2.0 / 3.0) * evolve_step(u2, p)
    except BlowUpError:
        return state.blow_up(p.dt)
    return state.advance(u3, p.dt)


def kolmogorov_scale(p: FluidParams, L: float = 1.0) -> float:
    """``L * Re**(-3/4)``, the classical filter radius."""
    if not p.re > 0:
        raise ValueError(f"Reynolds number must be positive, got {p.re}")
    return L * p.re**-0.75
