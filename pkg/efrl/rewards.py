"""Rewards for the filter-radius agent.

Every reward is built from an error ``e >= 0`` mapped into ``(-1, 1]`` by
:func:`reward_map`. The data-driven reward compares with a filtered reference;
the data-free reward combines the momentum residual of the step with the
change of the velocity gradient; the structure-preserving reward adds
penalties whenever energy or enstrophy grow.
"""

from __future__ import annotations

__all__ = [
    "RewardParams",
    "StepDiagnostics",
    "EpisodeReturn",
    "STEP_LOG_HEADER",
    "reward_map",
    "reward_dd",
    "residual_norm",
    "reward_df",
    "reward_sp",
    "step_reward",
    "cumulative_return",
]

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .constants import (
    ALPHA_DD,
    ALPHA_ENERGY,
    ALPHA_ENSTROPHY,
    ALPHA_GRAD,
    ALPHA_RES,
    GradForm,
    Variant,
)
from .fields.grid import VelocityField
from .fields.operators import advection_hat, grad_norm, l2_norm, project_hat, velocity_hat
from .metrics.diagnostics import enstrophy, kinetic_energy
from .solver.state import FluidParams

STEP_LOG_HEADER = (
    "episode",
    "step",
    "t",
    "delta",
    "reward",
    "res",
    "grad_norm",
    "energy",
    "enstrophy",
)


@dataclass(frozen=True)
class RewardParams:
    alpha: float = ALPHA_DD
    """Scale of the data-driven error."""

    alpha_res: float = ALPHA_RES
    alpha_grad: float = ALPHA_GRAD
    alpha_energy: float = ALPHA_ENERGY
    alpha_enstrophy: float = ALPHA_ENSTROPHY
    grad_form: GradForm = GradForm.DIFFERENCE

    def __post_init__(self) -> None:
        for name in ("alpha", "alpha_res", "alpha_grad", "alpha_energy", "alpha_enstrophy"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        object.__setattr__(self, "grad_form", GradForm(self.grad_form))


@dataclass(frozen=True)
class StepDiagnostics:
    """What the data-free rewards need to know about one step."""

    res: float
    grad_now: float
    grad_prev: float
    energy_now: float
    energy_prev: float
    enstrophy_now: float
    enstrophy_prev: float

    @classmethod
    def measure(
        cls, u_next: VelocityField, u_prev: VelocityField, p: FluidParams
    ) -> StepDiagnostics:
        return cls(
            res=residual_norm(u_next, u_prev, p),
            grad_now=grad_norm(u_next),
            grad_prev=grad_norm(u_prev),
            energy_now=kinetic_energy(u_next),
            energy_prev=kinetic_energy(u_prev),
            enstrophy_now=enstrophy(u_next),
            enstrophy_prev=enstrophy(u_prev),
        )

    def log_row(self, episode: int, step: int, t: float, delta: float, reward: float) -> tuple:
        """A row under :data:`STEP_LOG_HEADER`."""
        return (
            episode,
            step,
            t,
            delta,
            reward,
            self.res,
            self.grad_now,
            self.energy_now,
            self.enstrophy_now,
        )


class EpisodeReturn(NamedTuple):
    discounted: float
    """``sum(gamma**n * r_{n+1})``"""

    total: float
    """Plain sum of the rewards, at most the episode length."""


def reward_map(e: float, alpha: float) -> float:
    """``2 exp(-e / alpha) - 1``, strictly decreasing from 1 at ``e = 0``.

    Raises
    ------
    :class:`ValueError`
        If ``e`` is negative.

    Examples
    --------
    ::

        >>> reward_map(0.0, 1.0)
        1.0
        >>> abs(reward_map(np.log(2), 1.0)) < 1e-15
        True
    """
    if e < 0:
        raise ValueError(f"Errors are non-negative, got {e}")
    return float(2.0 * np.exp(-e / alpha) - 1.0)


def reward_dd(u: VelocityField, u_ref: VelocityField, params: RewardParams) -> float:
    """Data-driven reward from the squared relative L2 error against ``u_ref``."""
    ref_norm = l2_norm(u_ref)
    if ref_norm == 0:
        raise ValueError("The reference field has zero norm")
    e = (l2_norm(u - u_ref) / ref_norm) ** 2
    return reward_map(e, params.alpha)


def residual_norm(u_next: VelocityField, u_prev: VelocityField, p: FluidParams) -> float:
    """L2 norm of the projected momentum residual of the step ``u_prev -> u_next``.

    The residual is ``P[(u_next - u_prev) / dt + (u_next . grad) u_next -
    nu lap u_next]``, evaluated spectrally with the same dealiased advection as
    the evolve step. Projecting removes the pressure gradient.
    """
    grid = u_next.grid
    next_hat = velocity_hat(u_next)
    prev_hat = velocity_hat(u_prev)
    r_hat = (
        (next_hat - prev_hat) / p.dt
        + advection_hat(grid, next_hat)
        + p.nu * grid.k_squared * next_hat
    )
    r_hat = project_hat(grid, r_hat)
    return float(grid.side * np.sqrt((np.abs(r_hat) ** 2).sum()))


def reward_df(diag: StepDiagnostics, params: RewardParams) -> float:
    """Data-free reward: half residual term, half gradient-change term.

    The gradient term is ``2 exp(-|1 / x|) - 1`` with
    ``x = alpha_grad (g_now - g_prev)``, or ``x = alpha_grad g_now - g_prev``
    when ``grad_form`` is ``"equation"``. At ``x = 0`` it takes its limit, -1.
    """
    residual_term = 2.0 * np.exp(-params.alpha_res * diag.res) - 1.0
    if params.grad_form is GradForm.EQUATION:
        x = params.alpha_grad * diag.grad_now - diag.grad_prev
    else:
        x = params.alpha_grad * (diag.grad_now - diag.grad_prev)
    gradient_term = -1.0 if x == 0 else 2.0 * np.exp(-abs(1.0 / x)) - 1.0
    return float(0.5 * residual_term + 0.5 * gradient_term)


def _growth_penalty(now: float, prev: float, alpha: float) -> float:
    if now <= prev:
        return 0.0
    if prev <= 0:
        return -1.0
    return float(np.exp(-(now - prev) / (alpha * prev)) - 1.0)


def reward_sp(diag: StepDiagnostics, params: RewardParams, base: float) -> float:
    """``base`` plus a penalty in ``[-1, 0)`` for each of energy and enstrophy
    that grew over the step.

    Examples
    --------
    ::

        >>> diag = StepDiagnostics(0.0, 1.0, 1.0, 1.1, 1.0, 1.0, 1.0)
        >>> round(reward_sp(diag, RewardParams(), base=0.0), 5)
        -0.63212
    """
    return float(
        base
        + _growth_penalty(diag.energy_now, diag.energy_prev, params.alpha_energy)
        + _growth_penalty(diag.enstrophy_now, diag.enstrophy_prev, params.alpha_enstrophy)
    )


def step_reward(
    variant: Variant,
    diag: StepDiagnostics,
    params: RewardParams,
    u: VelocityField | None = None,
    u_ref: VelocityField | None = None,
) -> float:
    """The reward ``variant`` assigns to a completed, finite step.

    ``u`` and ``u_ref`` are required by the data-driven variants.
    """
    if variant.needs_references:
        if u is None or u_ref is None:
            raise ValueError(f"Variant '{variant.value}' needs the field and its reference")
        base = reward_dd(u, u_ref, params)
    else:
        base = reward_df(diag, params)
    if variant.structure_preserving:
        return reward_sp(diag, params, base)
    return base


def cumulative_return(rewards: Sequence[float], gamma: float) -> EpisodeReturn:
    """Discounted return and plain sum of an episode's rewards.

    Examples
    --------
    ::

        >>> cumulative_return([1.0, 1.0], 0.99)
        EpisodeReturn(discounted=1.99, total=2.0)
    """
    r = np.asarray(rewards, dtype=np.float64)
    if r.size == 0:
        return EpisodeReturn(0.0, 0.0)
    discounts = gamma ** np.arange(r.size)
    return EpisodeReturn(float(discounts @ r), float(r.sum()))
