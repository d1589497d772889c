"""Episodes of Evolve-Filter stepping driven by filter-radius actions."""

from __future__ import annotations

__all__ = [
    "EpisodeConfig",
    "Transition",
    "EvolveFilterEnv",
    "encode_observation",
]

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .. import logger
from ..constants import GAMMA, RAND_WINDOW_DIVISOR, TRAIN_WINDOW_DIVISOR, StartPolicy, Variant
from ..fields.grid import VelocityField
from ..rewards import RewardParams, StepDiagnostics, step_reward
from ..solver.state import FluidParams, SolverState
from ..solver.steps import ef_step
from ..utils.exceptions import ConfigurationError
from .actions import ActionSpace, build_action_space
from .references import ReferenceStore

if TYPE_CHECKING:
    from ..typing import Observation


@dataclass(frozen=True)
class EpisodeConfig:
    """How the episodes of one variant start and how long they run."""

    variant: Variant
    n_train: int
    """Steps per episode."""

    start_window: int = 0
    """Random starts are drawn from ``1..start_window``."""

    gamma: float = GAMMA
    start_policy: StartPolicy | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.start_policy is None:
            object.__setattr__(self, "start_policy", self.variant.start_policy)
        if self.n_train < 1:
            raise ValueError(f"Episodes need at least one step, got {self.n_train}")
        if self.start_policy is StartPolicy.UNIFORM_RANDOM and self.start_window < 1:
            raise ValueError("Random starts need a window of at least one step")
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")

    @classmethod
    def for_variant(cls, variant: Variant, n_steps: int, gamma: float = GAMMA) -> EpisodeConfig:
        """Episodes of a run of ``n_steps`` steps.

        Episodes from ``t = 0`` last ``n_steps / 4`` steps; randomly started ones
        last ``n_steps / 10`` and start within the first ``n_steps / 4``.
        """
        variant = Variant(variant)
        n_train = n_steps // TRAIN_WINDOW_DIVISOR
        if variant.start_policy is StartPolicy.UNIFORM_RANDOM:
            return cls(variant, n_steps // RAND_WINDOW_DIVISOR, n_train, gamma)
        return cls(variant, n_train, 0, gamma)

    @property
    def last_reference_step(self) -> int:
        """The last step whose reference an episode may ask for."""
        if self.start_policy is StartPolicy.UNIFORM_RANDOM:
            return self.start_window + self.n_train
        return self.n_train


@dataclass(frozen=True)
class Transition:
    obs: Observation
    action: int
    reward: float
    next_obs: Observation
    done: bool


def encode_observation(u: VelocityField, scale: float = 1.0) -> Observation:
    """``ux`` then ``uy``, row-major, divided by ``scale``.

    Raises
    ------
    :class:`ValueError`
        If ``u`` is not finite or ``scale`` is not positive.
    """
    if not scale > 0:
        raise ValueError(f"Observation scale must be positive, got {scale}")
    if not u.is_finite():
        raise ValueError("Cannot observe a blown-up field")
    return u.stacked.ravel() / scale


class EvolveFilterEnv:
    """One Evolve-Filter run seen as a decision process.

    Each action picks the filter radius of the next step. Observations are the
    velocity divided by the RMS speed of ``initial``. A blown-up step ends the
    episode with reward -1 and a zero next observation.

    Parameters
    ----------
    initial
        The initial condition at ``t = 0``.
    params
        Viscosity and time step.
    episode
        Start policy and length of the episodes.
    rewards
        Reward scales.
    refs
        Filtered references, required by the data-driven variants.
    actions
        The filter radii; defaults to :func:`build_action_space`.
    seed
        Seed of the generator drawing random starts.

    Raises
    ------
    :class:`~.ConfigurationError`
        If the variant needs references that are absent or too short.
    """

    def __init__(
        self,
        initial: VelocityField,
        params: FluidParams,
        episode: EpisodeConfig,
        rewards: RewardParams | None = None,
        refs: ReferenceStore | None = None,
        actions: ActionSpace | None = None,
        seed: int | None = None,
    ) -> None:
        variant = episode.variant
        needs_refs = variant.needs_references or episode.start_policy is StartPolicy.UNIFORM_RANDOM
        if needs_refs:
            if refs is None:
                raise ConfigurationError(
                    f"Variant '{variant.value}' needs filtered-DNS references"
                )
            refs.require(variant.value, episode.last_reference_step)
            if refs.grid != initial.grid:
                raise ConfigurationError(
                    f"References on {refs.grid} do not match the run grid {initial.grid}"
                )
        self.initial = initial
        self.params = params
        self.episode = episode
        self.rewards = rewards or RewardParams()
        self.refs = refs
        self.actions = actions or build_action_space()
        self.rng = np.random.default_rng(seed)
        rms = initial.rms()
        self.obs_scale = rms if rms > 0 else 1.0

        self.state: SolverState | None = None
        self.obs: Observation | None = None
        self.steps_taken = 0
        self.done = True
        self.last_delta = float("nan")
        self.last_diagnostics: StepDiagnostics | None = None

    @property
    def obs_dim(self) -> int:
        return 2 * self.initial.grid.n**2

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    def observe(self, u: VelocityField) -> Observation:
        return encode_observation(u, self.obs_scale)

    def reset(self) -> tuple[SolverState, Observation]:
        """Start an episode at ``t = 0`` or at a random reference step."""
        if self.episode.start_policy is StartPolicy.UNIFORM_RANDOM:
            start = int(self.rng.integers(1, self.episode.start_window + 1))
            self.state = SolverState.initial(
                self.refs[start], t=start * self.params.dt, step_index=start
            )
        else:
            self.state = SolverState.initial(self.initial)
        self.obs = self.observe(self.state.u)
        self.steps_taken = 0
        self.done = False
        self.last_delta = float("nan")
        self.last_diagnostics = None
        logger.debug("Episode start at step %(start)s", {"start": self.state.step_index})
        return self.state, self.obs

    def step(self, action_index: int) -> tuple[Transition, SolverState]:
        """Filter with radius ``actions[action_index]`` after evolving one step.

        Raises
        ------
        :class:`ValueError`
            If ``action_index`` is not an action.
        :class:`RuntimeError`
            If the episode is over.
        """
        if self.done or self.state is None:
            raise RuntimeError("The episode is over; call reset() first")
        delta = self.actions.decode(action_index)
        prev = self.state
        state = ef_step(prev, delta, self.params)
        self.steps_taken += 1
        self.last_delta = delta

        if state.blown_up:
            logger.debug("Episode blew up at t = %(t).4f", {"t": state.t})
            self.last_diagnostics = None
            reward = -1.0
            next_obs = np.zeros(self.obs_dim)
            done = True
        else:
            diag = StepDiagnostics.measure(state.u, prev.u, self.params)
            u_ref = self.refs[state.step_index] if self.episode.variant.needs_references else None
            reward = step_reward(self.episode.variant, diag, self.rewards, state.u, u_ref)
            self.last_diagnostics = diag
            next_obs = self.observe(state.u)
            done = self.steps_taken >= self.episode.n_train

        transition = Transition(self.obs, int(action_index), reward, next_obs, done)
        self.state = state
        self.obs = next_obs
        self.done = done
        return transition, state
