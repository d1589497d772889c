"""A multilayer perceptron Q-network with hand-written backpropagation.

Hidden layers use ReLU, the output layer is linear with one unit per action.
Weights are stored ``(fan_in, fan_out)`` so a batch of observations maps as
``x @ W + b``.
"""

from __future__ import annotations

__all__ = [
    "MlpParams",
    "init_mlp",
    "q_forward",
    "loss_and_gradients",
    "global_norm",
    "clip_gradients",
]

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:
    from ..typing import FloatArray, IntArray, Observation, ObservationBatch, QValues


@dataclass
class MlpParams:
    """Weights and biases, layer by layer."""

    weights: list[FloatArray]
    biases: list[FloatArray]

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("Every layer needs one weight matrix and one bias vector")
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.ndim != 2 or b.shape != (W.shape[1],):
                raise ValueError(f"Layer {i}: weights {W.shape} do not match bias {b.shape}")
            if i and W.shape[0] != self.weights[i - 1].shape[1]:
                raise ValueError(f"Layer {i} does not connect to layer {i - 1}")

    @property
    def layer_sizes(self) -> list[int]:
        """``[obs_dim, hidden..., n_actions]``"""
        return [self.weights[0].shape[0]] + [W.shape[1] for W in self.weights]

    @property
    def obs_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def n_actions(self) -> int:
        return self.weights[-1].shape[1]

    def arrays(self) -> list[FloatArray]:
        """Every parameter array, weights then bias for each layer."""
        out = []
        for W, b in zip(self.weights, self.biases):
            out.extend((W, b))
        return out

    @classmethod
    def from_arrays(cls, arrays: Sequence[FloatArray]) -> MlpParams:
        return cls(list(arrays[0::2]), list(arrays[1::2]))

    def copy(self) -> MlpParams:
        return MlpParams([W.copy() for W in self.weights], [b.copy() for b in self.biases])

    def zeros_like(self) -> MlpParams:
        return MlpParams(
            [np.zeros_like(W) for W in self.weights], [np.zeros_like(b) for b in self.biases]
        )


def init_mlp(layer_sizes: Sequence[int], rng: np.random.Generator) -> MlpParams:
    """Uniform initialization in ``+-1/sqrt(fan_in)`` for weights and biases."""
    if len(layer_sizes) < 2 or min(layer_sizes) < 1:
        raise ValueError(f"Invalid layer sizes {list(layer_sizes)}")
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return MlpParams(weights, biases)


def _as_batch(params: MlpParams, obs: Observation | ObservationBatch) -> FloatArray:
    x = np.asarray(obs, dtype=np.float64)
    batch = np.atleast_2d(x)
    if x.ndim > 2 or batch.shape[1] != params.obs_dim:
        raise ValueError(
            f"Observation of shape {x.shape} does not fit a network with input {params.obs_dim}"
        )
    return batch


def _forward(params: MlpParams, x: FloatArray) -> tuple[list[FloatArray], list[FloatArray]]:
    """Layer inputs and pre-activations of a batch."""
    inputs, pre = [], []
    a = x
    last = len(params.weights) - 1
    for i, (W, b) in enumerate(zip(params.weights, params.biases)):
        inputs.append(a)
        z = a @ W + b
        pre.append(z)
        a = z if i == last else np.maximum(z, 0.0)
    return inputs, pre


def q_forward(params: MlpParams, obs: Observation | ObservationBatch) -> QValues:
    """Action values of one observation, or of each row of a batch.

    Raises
    ------
    :class:`ValueError`
        If the observation length differs from the network input size.
    """
    x = _as_batch(params, obs)
    q = _forward(params, x)[1][-1]
    return q[0] if np.ndim(obs) == 1 else q


def loss_and_gradients(
    params: MlpParams,
    obs: ObservationBatch,
    actions: IntArray,
    targets: FloatArray,
) -> tuple[float, MlpParams]:
    """Mean squared error between ``Q(obs, actions)`` and ``targets``.

    Only the outputs of the taken actions enter the loss.

    Returns
    -------
    tuple[float, :class:`MlpParams`]
        The loss and its gradient with respect to every parameter.
    """
    x = _as_batch(params, obs)
    batch = x.shape[0]
    rows = np.arange(batch)
    inputs, pre = _forward(params, x)
    error = pre[-1][rows, actions] - targets
    loss = float(np.mean(error**2))

    grad_out = np.zeros_like(pre[-1])
    grad_out[rows, actions] = 2.0 * error / batch
    grad_w: list[FloatArray] = [None] * len(params.weights)
    grad_b: list[FloatArray] = [None] * len(params.weights)
    delta = grad_out
    for i in reversed(range(len(params.weights))):
        grad_w[i] = inputs[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i:
            delta = (delta @ params.weights[i].T) * (pre[i - 1] > 0)
    return loss, MlpParams(grad_w, grad_b)


def global_norm(grads: MlpParams) -> float:
    return float(np.sqrt(sum(float((g**2).sum()) for g in grads.arrays())))


def clip_gradients(grads: MlpParams, max_norm: float) -> tuple[MlpParams, float]:
    """Scale ``grads`` down to a global norm of at most ``max_norm``.

    Returns the clipped gradients and the norm before clipping.
    """
    norm = global_norm(grads)
    if norm <= max_norm or norm == 0:
        return grads, norm
    scale = max_norm / norm
    return MlpParams.from_arrays([g * scale for g in grads.arrays()]), norm
