"""Experience replay."""

from __future__ import annotations

__all__ = ["ReplayBuffer", "TransitionBatch"]

from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from ..env.episode import Transition

if TYPE_CHECKING:
    from ..typing import FloatArray, IntArray, ObservationBatch


class TransitionBatch(NamedTuple):
    obs: ObservationBatch
    actions: IntArray
    rewards: FloatArray
    next_obs: ObservationBatch
    dones: FloatArray


class ReplayBuffer:
    """A ring buffer of the most recent ``capacity`` transitions.

    Transitions are kept by reference, so consecutive ones share their
    observation arrays.
    """

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError(f"Replay capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.storage: list[Transition] = []
        self.cursor = 0

    def __len__(self) -> int:
        return len(self.storage)

    def push(self, transition: Transition) -> None:
        if len(self.storage) < self.capacity:
            self.storage.append(transition)
        else:
            self.storage[self.cursor] = transition
        self.cursor = (self.cursor + 1) % self.capacity

    def sample(self, batch_size: int, rng: np.random.Generator) -> TransitionBatch:
        """Draw ``batch_size`` distinct transitions uniformly."""
        if batch_size > len(self):
            raise ValueError(f"Cannot draw {batch_size} transitions from {len(self)}")
        picked = [self.storage[i] for i in rng.choice(len(self), size=batch_size, replace=False)]
        return TransitionBatch(
            np.stack([t.obs for t in picked]),
            np.array([t.action for t in picked], dtype=np.int64),
            np.array([t.reward for t in picked], dtype=np.float64),
            np.stack([t.next_obs for t in picked]),
            np.array([t.done for t in picked], dtype=np.float64),
        )
