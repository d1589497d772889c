"""The discrete set of filter radii the agent chooses from."""

from __future__ import annotations

__all__ = ["ActionSpace", "build_action_space"]

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from ..constants import LARGE_RADII, N_ACTIONS, SMALL_RADII

if TYPE_CHECKING:
    from ..typing import FloatArray


@dataclass(frozen=True)
class ActionSpace:
    """Filter radii in ascending order; action ``i`` applies ``values[i]``."""

    values: FloatArray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("An action space needs a non-empty list of radii")
        if (np.diff(values) <= 0).any() or values[0] < 0:
            raise ValueError("Filter radii must be non-negative and strictly increasing")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def decode(self, index: int) -> float:
        """The radius of action ``index``.

        Raises
        ------
        :class:`ValueError`
            If ``index`` is not an action.
        """
        if isinstance(index, (bool, np.bool_)) or not 0 <= index < len(self):
            raise ValueError(f"Invalid action index {index}; expected 0..{len(self) - 1}")
        return float(self.values[int(index)])

    def encode(self, delta: float) -> int:
        """The action whose radius is ``delta``."""
        matches = np.flatnonzero(np.isclose(self.values, delta, rtol=1e-12, atol=0.0))
        if matches.size == 0:
            raise ValueError(f"No action has filter radius {delta:g}")
        return int(matches[0])


def build_action_space() -> ActionSpace:
    """Four log-spaced radii in ``[1e-10, 1e-7]`` then forty-six in ``[1e-6, 1e-3]``.

    Examples
    --------
    ::

        >>> space = build_action_space()
        >>> len(space), space.decode(0), space.decode(49)
        (50, 1e-10, 0.001)
    """
    values = np.concatenate([np.logspace(*SMALL_RADII), np.logspace(*LARGE_RADII)])
    assert len(values) == N_ACTIONS
    return ActionSpace(values)
