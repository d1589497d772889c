"""
Constant definitions.
"""

from __future__ import annotations

from enum import Enum

import numpy as np
from cloup import Context

__all__ = [
    "DNS_BLOW_UP_MESSAGE",
    "MISSING_REFERENCES_MESSAGE",
    "EXIT_CONFIG_ERROR",
    "EXIT_BLOW_UP",
    "SNAPSHOT_MAGIC",
    "SNAPSHOT_VERSION",
    "SNAPSHOT_NAME_FORMAT",
    "REFERENCE_MANIFEST",
    "CHECKPOINT_MAGIC",
    "CHECKPOINT_VERSION",
    "PI",
    "TAU",
    "DEFAULT_SIDE",
    "MIN_GRID_POINTS",
    "BLOW_UP_FACTOR",
    "DEFAULT_KAPPA_PEAK",
    "N_ACTIONS",
    "SMALL_RADII",
    "LARGE_RADII",
    "ALPHA_DD",
    "ALPHA_RES",
    "ALPHA_GRAD",
    "ALPHA_ENERGY",
    "ALPHA_ENSTROPHY",
    "GAMMA",
    "LEARNING_RATE",
    "HIDDEN_LAYERS",
    "BATCH_SIZE",
    "MAX_GRAD_NORM",
    "REPLAY_CAPACITY",
    "EPSILON_START",
    "EPSILON_END",
    "EXPLORATION_FRACTION",
    "ADAM_BETA1",
    "ADAM_BETA2",
    "ADAM_EPSILON",
    "TRAIN_WINDOW_DIVISOR",
    "RAND_WINDOW_DIVISOR",
    "PROFILES",
    "DEFAULT_EPISODES",
    "EPILOG",
    "CONTEXT_SETTINGS",
    "Variant",
    "StartPolicy",
    "GradForm",
]

# Messages

DNS_BLOW_UP_MESSAGE = """
   The DNS blew up at t = {:.4f} (step {}). Refine the fine grid or lower the
   time step before generating references.
"""
MISSING_REFERENCES_MESSAGE = """
   Variant '{}' needs filtered-DNS references covering steps 0..{}, but {}.
   Run `efrl gen-dns` with the same configuration first.
"""

# Exit codes
EXIT_CONFIG_ERROR = 2
EXIT_BLOW_UP = 3

# File formats
SNAPSHOT_MAGIC = b"EFRL"
SNAPSHOT_VERSION = 1
SNAPSHOT_NAME_FORMAT = "step_{:06d}"
REFERENCE_MANIFEST = "manifest"
CHECKPOINT_MAGIC = b"EFDQ"
CHECKPOINT_VERSION = 1

# Mathematical constants
PI = np.pi
"""The ratio of the circumference of a circle to its diameter."""

TAU = 2 * PI
"""Converts integer mode numbers into angular wavenumbers on a unit domain."""

# Grid and flow
DEFAULT_SIDE = 1.0
MIN_GRID_POINTS = 8
BLOW_UP_FACTOR = 1e6
"""A state is blown up once its kinetic energy exceeds this multiple of the
initial energy."""

DEFAULT_KAPPA_PEAK = 10.0

# Action space: filter radii
N_ACTIONS = 50
SMALL_RADII = (-10.0, -7.0, 4)
"""``(log10 start, log10 stop, count)`` of the small, nearly inert radii."""

LARGE_RADII = (-6.0, -3.0, 46)
"""``(log10 start, log10 stop, count)`` of the radii that shape the flow."""

# Rewards
ALPHA_DD = 1.0
ALPHA_RES = 0.1
"""Scale of the projected momentum residual. A turbulent step on the coarse grid
leaves a residual of order 0.1 to 10, so the residual term of the data-free
reward spans most of ``(-1, 1]`` across the action space."""

ALPHA_GRAD = 1e4
ALPHA_ENERGY = 0.1
ALPHA_ENSTROPHY = 0.1

# Agent
GAMMA = 0.99
LEARNING_RATE = 1e-5
HIDDEN_LAYERS = (64, 64)
BATCH_SIZE = 128
MAX_GRAD_NORM = 5.0
REPLAY_CAPACITY = 50_000
EPSILON_START = 1.0
EPSILON_END = 0.05
EXPLORATION_FRACTION = 0.5
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8

# Episodes: N_train = N / 4, N_rand_train = N / 10
TRAIN_WINDOW_DIVISOR = 4
RAND_WINDOW_DIVISOR = 10

# Run profiles
PROFILES: dict[str, dict[str, int | float]] = {
    "full": {
        "coarse": 64,
        "fine": 256,
        "t_final": 2.0,
        "dt": 1e-3,
        "re": 40_000.0,
    },
    "ci": {
        "coarse": 32,
        "fine": 128,
        "t_final": 0.5,
        "dt": 1e-3,
        "re": 40_000.0,
        "episodes": 20,
    },
}

EPILOG = "Evolve-Filter regularization with learned filter radii."

CONTEXT_SETTINGS = Context.settings(
    align_option_groups=True,
    align_sections=True,
    show_constraints=True,
)


class StartPolicy(str, Enum):
    """Where an episode begins."""

    FIXED_AT_ZERO = "fixed"  #: Always from the initial condition at t = 0.
    UNIFORM_RANDOM = "random"  #: From a reference snapshot drawn from {1..N_train}.


class GradForm(str, Enum):
    """Parenthesization of the gradient-change term of the data-free reward."""

    DIFFERENCE = "difference"  #: ``|1 / (alpha_grad (g_now - g_prev))|``
    EQUATION = "equation"  #: ``|1 / (alpha_grad g_now - g_prev)|``


class Variant(str, Enum):
    """Reward and episode variants of the learned Evolve-Filter.

    Examples
    --------
    ::

        >>> Variant("dd-rand").start_policy
        <StartPolicy.UNIFORM_RANDOM: 'random'>
        >>> Variant.DF.needs_references
        False
    """

    DD = "dd"
    DD_RAND = "dd-rand"
    DF = "df"
    SP_DF = "sp-df"
    SP_DD = "sp-dd"

    @property
    def needs_references(self) -> bool:
        return self in (Variant.DD, Variant.DD_RAND, Variant.SP_DD)

    @property
    def structure_preserving(self) -> bool:
        return self in (Variant.SP_DF, Variant.SP_DD)

    @property
    def start_policy(self) -> StartPolicy:
        if self is Variant.DD_RAND:
            return StartPolicy.UNIFORM_RANDOM
        return StartPolicy.FIXED_AT_ZERO


DEFAULT_EPISODES: dict[Variant, int] = {
    Variant.DD: 90,
    Variant.DD_RAND: 210,
    Variant.DF: 90,
    Variant.SP_DF: 60,
    Variant.SP_DD: 60,
}
