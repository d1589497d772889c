"""Fixed-radius runs used by the baselines."""

from __future__ import annotations

__all__ = ["rollout"]

from typing import Callable

from tqdm import tqdm

from .state import FluidParams, SolverState
from .steps import ef_step, noef_step

StepCallback = Callable[[SolverState], None]


def rollout(
    state: SolverState,
    p: FluidParams,
    n_steps: int,
    delta: float | None = None,
    callback: StepCallback | None = None,
    progress: bool = False,
    description: str = "Rollout",
) -> SolverState:
    """Take up to ``n_steps`` steps, stopping early on blow-up.

    Parameters
    ----------
    state
        Where to start; must not be blown up.
    p
        Viscosity and time step.
    n_steps
        Number of steps to take.
    delta
        Filter radius applied after every step, or ``None`` for no filter.
    callback
        Called with every new state, the blown-up one included.
    progress
        Whether to show a progress bar.

    Returns
    -------
    :class:`~.SolverState`
        The last state reached.
    """
    for _ in tqdm(range(n_steps), desc=description, disable=not progress, leave=False):
        state = noef_step(state, p) if delta is None else ef_step(state, delta, p)
        if callback is not None:
            callback(state)
        if state.blown_up:
            break
    return state
