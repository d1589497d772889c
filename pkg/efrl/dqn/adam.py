"""The Adam optimizer."""

from __future__ import annotations

__all__ = ["AdamState", "adam_update"]

from dataclasses import dataclass

import numpy as np

from ..constants import ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON
from .network import MlpParams


@dataclass
class AdamState:
    """Moment estimates shaped like the network they optimize."""

    m: MlpParams
    v: MlpParams
    step: int = 0
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPSILON

    @classmethod
    def zeros_like(cls, params: MlpParams) -> AdamState:
        return cls(params.zeros_like(), params.zeros_like())


def adam_update(params: MlpParams, grads: MlpParams, state: AdamState, lr: float) -> None:
    """One bias-corrected Adam step, applied to ``params`` and ``state`` in place."""
    state.step += 1
    correction1 = 1.0 - state.beta1**state.step
    correction2 = 1.0 - state.beta2**state.step
    for p, g, m, v in zip(params.arrays(), grads.arrays(), state.m.arrays(), state.v.arrays()):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g**2
        p -= lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
