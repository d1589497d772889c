"""Deep Q-learning: behaviour policy, temporal-difference updates and the
target network."""

from __future__ import annotations

__all__ = [
    "AgentConfig",
    "DQNAgent",
    "select_action",
    "td_targets",
    "train_step",
    "target_sync",
    "epsilon_at",
]

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from ..constants import (
    BATCH_SIZE,
    EPSILON_END,
    EPSILON_START,
    EXPLORATION_FRACTION,
    GAMMA,
    HIDDEN_LAYERS,
    LEARNING_RATE,
    MAX_GRAD_NORM,
    REPLAY_CAPACITY,
)
from .adam import AdamState, adam_update
from .network import MlpParams, clip_gradients, init_mlp, loss_and_gradients, q_forward
from .replay import ReplayBuffer, TransitionBatch

if TYPE_CHECKING:
    from ..env.episode import Transition
    from ..typing import FloatArray, Observation


@dataclass(frozen=True)
class AgentConfig:
    gamma: float = GAMMA
    learning_rate: float = LEARNING_RATE
    batch_size: int = BATCH_SIZE
    max_grad_norm: float = MAX_GRAD_NORM
    target_update_interval: int = 1
    """Environment steps between hard copies of the online network."""

    replay_capacity: int = REPLAY_CAPACITY
    epsilon_start: float = EPSILON_START
    epsilon_end: float = EPSILON_END
    exploration_fraction: float = EXPLORATION_FRACTION
    """Share of all environment steps over which epsilon decays."""

    hidden_layers: tuple[int, ...] = HIDDEN_LAYERS
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not self.learning_rate > 0:
            raise ValueError(f"The learning rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1 or self.replay_capacity < self.batch_size:
            raise ValueError("The replay buffer must hold at least one batch")
        if self.target_update_interval < 1:
            raise ValueError("The target update interval must be positive")
        for name in ("epsilon_start", "epsilon_end", "exploration_fraction"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")


def select_action(
    params: MlpParams,
    obs: Observation,
    epsilon: float,
    rng: np.random.Generator,
) -> int:
    """Epsilon-greedy choice; greedy ties go to the lowest index.

    Raises
    ------
    :class:`ValueError`
        If ``epsilon`` is outside ``[0, 1]``.
    """
    if not 0 <= epsilon <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    if rng.random() < epsilon:
        return int(rng.integers(params.n_actions))
    return int(np.argmax(q_forward(params, obs)))


def td_targets(batch: TransitionBatch, target_params: MlpParams, gamma: float) -> FloatArray:
    """``r + gamma * max_a' Q_target(s', a')``, or ``r`` for terminal transitions."""
    next_q = q_forward(target_params, batch.next_obs).max(axis=1)
    return batch.rewards + gamma * (1.0 - batch.dones) * next_q


def train_step(
    params: MlpParams,
    adam: AdamState,
    buffer: ReplayBuffer,
    target_params: MlpParams,
    cfg: AgentConfig,
    rng: np.random.Generator,
) -> float:
    """Fit ``params`` to the TD targets of one sampled batch, in place.

    Gradients are clipped to a global norm of ``cfg.max_grad_norm`` before the
    Adam update.

    Returns
    -------
    float
        The loss before the update.
    """
    batch = buffer.sample(cfg.batch_size, rng)
    targets = td_targets(batch, target_params, cfg.gamma)
    loss, grads = loss_and_gradients(params, batch.obs, batch.actions, targets)
    grads, _ = clip_gradients(grads, cfg.max_grad_norm)
    adam_update(params, grads, adam, cfg.learning_rate)
    return loss


def target_sync(
    params: MlpParams,
    target_params: MlpParams,
    step_counter: int,
    interval: int,
) -> MlpParams:
    """A copy of ``params`` every ``interval`` steps, else ``target_params``."""
    if step_counter % interval == 0:
        return params.copy()
    return target_params


def epsilon_at(step: int, total_steps: int, cfg: AgentConfig) -> float:
    """Linear decay from ``epsilon_start`` to ``epsilon_end`` over the first
    ``exploration_fraction`` of ``total_steps``, constant afterwards."""
    horizon = cfg.exploration_fraction * total_steps
    if horizon <= 0 or step >= horizon:
        return cfg.epsilon_end
    return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * step / horizon


class DQNAgent:
    """Online and target networks, their optimizer and the replay buffer.

    Parameters
    ----------
    obs_dim
        Length of an observation.
    n_actions
        Number of actions.
    config
        Hyperparameters; ``config.seed`` seeds the one generator used for
        initialization, exploration and replay sampling.
    """

    def __init__(self, obs_dim: int, n_actions: int, config: AgentConfig) -> None:
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.online = init_mlp([obs_dim, *config.hidden_layers, n_actions], self.rng)
        self.target = self.online.copy()
        self.adam = AdamState.zeros_like(self.online)
        self.buffer = ReplayBuffer(config.replay_capacity)
        self.env_steps = 0
        self.updates = 0

    def act(self, obs: Observation, epsilon: float) -> int:
        return select_action(self.online, obs, epsilon, self.rng)

    def observe(self, transition: Transition) -> float | None:
        """Store ``transition``, learn from one batch and sync the target.

        Returns the loss, or ``None`` while the buffer holds less than a batch.
        """
        self.buffer.push(transition)
        self.env_steps += 1
        loss = None
        if len(self.buffer) >= self.config.batch_size:
            loss = train_step(
                self.online, self.adam, self.buffer, self.target, self.config, self.rng
            )
            self.updates += 1
        self.target = target_sync(
            self.online, self.target, self.env_steps, self.config.target_update_interval
        )
        return loss
