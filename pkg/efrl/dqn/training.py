"""The episode loop of training and the greedy rollout of evaluation."""

from __future__ import annotations

__all__ = [
    "EpisodeRecord",
    "TRAINING_LOG_HEADER",
    "train_agent",
    "reward_plateau",
    "greedy_rollout",
]

from dataclasses import astuple, dataclass
from typing import Callable, Sequence

import numpy as np
from tqdm import tqdm

from .. import logger
from ..env.episode import EvolveFilterEnv, Transition
from ..rewards import cumulative_return
from ..solver.state import SolverState
from .agent import DQNAgent, epsilon_at
from .network import MlpParams, q_forward

TRAINING_LOG_HEADER = (
    "episode",
    "total_reward",
    "discounted_return",
    "mean_loss",
    "epsilon",
    "steps",
    "blown_up",
)


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int
    total_reward: float
    """Plain sum of the rewards, at most the episode length."""

    discounted_return: float
    mean_loss: float
    """Mean TD loss over the updates of the episode, ``nan`` when none ran."""

    epsilon: float
    """Exploration rate at the end of the episode."""

    steps: int
    blown_up: bool

    def row(self) -> tuple:
        return astuple(self)


StepHook = Callable[[int, Transition, EvolveFilterEnv], None]
EpisodeHook = Callable[[EpisodeRecord, DQNAgent], None]


def reward_plateau(
    totals: Sequence[float],
    window: int,
    tolerance: float,
    n_train: int,
) -> bool:
    """Whether the last ``window`` episode rewards have stopped rising.

    A line is fitted through them; the rewards have plateaued when the change
    it predicts over the window, ``|slope| * window``, is at most
    ``tolerance * n_train``.

    Examples
    --------
    ::

        >>> reward_plateau([10.0] * 12, window=10, tolerance=0.02, n_train=500)
        True
        >>> reward_plateau(list(range(0, 120, 10)), window=10, tolerance=0.02, n_train=500)
        False
    """
    if window < 2 or len(totals) < window:
        return False
    recent = np.asarray(totals[-window:], dtype=np.float64)
    slope = np.polyfit(np.arange(window), recent, 1)[0]
    return bool(abs(slope) * window <= tolerance * n_train)


def train_agent(
    env: EvolveFilterEnv,
    agent: DQNAgent,
    episodes: int,
    on_step: StepHook | None = None,
    on_episode: EpisodeHook | None = None,
    stop_on_plateau: bool = False,
    plateau_window: int = 10,
    plateau_tolerance: float = 0.02,
    progress: bool = False,
) -> list[EpisodeRecord]:
    """Run ``episodes`` epsilon-greedy episodes, learning after every step.

    Epsilon decays over the steps of the whole budget. With
    ``stop_on_plateau`` training ends early once :func:`reward_plateau` holds.

    Returns
    -------
    list[:class:`EpisodeRecord`]
        One record per episode run.
    """
    total_steps = episodes * env.episode.n_train
    records: list[EpisodeRecord] = []
    logger.info(
        "Training for %(episodes)s episodes of %(steps)s steps",
        {"episodes": episodes, "steps": env.episode.n_train},
    )
    bar = tqdm(range(episodes), desc="Training", disable=not progress)
    for episode in bar:
        _, obs = env.reset()
        rewards, losses = [], []
        epsilon = agent.config.epsilon_start
        while not env.done:
            epsilon = epsilon_at(agent.env_steps, total_steps, agent.config)
            transition, _ = env.step(agent.act(obs, epsilon))
            loss = agent.observe(transition)
            if loss is not None:
                losses.append(loss)
            rewards.append(transition.reward)
            if on_step is not None:
                on_step(episode, transition, env)
            obs = transition.next_obs

        ret = cumulative_return(rewards, env.episode.gamma)
        record = EpisodeRecord(
            episode=episode,
            total_reward=ret.total,
            discounted_return=ret.discounted,
            mean_loss=float(np.mean(losses)) if losses else float("nan"),
            epsilon=epsilon,
            steps=len(rewards),
            blown_up=env.state.blown_up,
        )
        records.append(record)
        bar.set_postfix(reward=f"{ret.total:.1f}")
        logger.info(
            "Episode %(episode)s: reward %(reward).2f over %(steps)s steps, "
            "loss %(loss).3e, epsilon %(epsilon).3f",
            {
                "episode": episode,
                "reward": ret.total,
                "steps": record.steps,
                "loss": record.mean_loss,
                "epsilon": epsilon,
            },
        )
        if on_episode is not None:
            on_episode(record, agent)
        if stop_on_plateau and reward_plateau(
            [r.total_reward for r in records],
            plateau_window,
            plateau_tolerance,
            env.episode.n_train,
        ):
            logger.info("Episode rewards have plateaued; stopping after %(n)s episodes", {"n": episode + 1})
            break
    return records


RolloutHook = Callable[[int, float, SolverState], None]


def greedy_rollout(
    env: EvolveFilterEnv,
    params: MlpParams,
    on_step: RolloutHook | None = None,
    progress: bool = False,
) -> SolverState:
    """Play one episode with the greedy policy of ``params``.

    ``on_step`` receives the action, its filter radius and the new state after
    every step.
    """
    _, obs = env.reset()
    bar = tqdm(total=env.episode.n_train, desc="Evaluating", disable=not progress, leave=False)
    while not env.done:
        action = int(np.argmax(q_forward(params, obs)))
        transition, state = env.step(action)
        if on_step is not None:
            on_step(action, env.last_delta, state)
        obs = transition.next_obs
        bar.update()
    bar.close()
    return env.state
