"""Custom type definitions used in efrl.

.. admonition:: Note for developers
    :class: important

    Type aliases are grouped under ``[CATEGORY]`` strings, as below. If you
    need a new category, respect the format.
"""

from __future__ import annotations

from os import PathLike
from typing import Callable, Union

import numpy as np
import numpy.typing as npt
from typing_extensions import TypeAlias

__all__ = [
    "EFFloat",
    "EFComplex",
    "FloatArray",
    "ComplexArray",
    "IntArray",
    "GridValues",
    "SpectralValues",
    "Observation",
    "ObservationBatch",
    "QValues",
    "SpectrumProfile",
    "StrPath",
]


"""
[CATEGORY]
Primitive data types
"""

EFFloat: TypeAlias = np.float64
"""A double-precision floating-point value. Every field, network weight
and optimizer moment in efrl uses it.
"""

EFComplex: TypeAlias = np.complex128
"""A double-precision complex value, used for Fourier coefficients."""


"""
[CATEGORY]
Arrays
"""

FloatArray: TypeAlias = npt.NDArray[EFFloat]
"""A :class:`numpy.ndarray` of 64-bit floats of any shape."""

ComplexArray: TypeAlias = npt.NDArray[EFComplex]
"""A :class:`numpy.ndarray` of 128-bit complex values of any shape."""

IntArray: TypeAlias = npt.NDArray[np.int64]
"""A :class:`numpy.ndarray` of 64-bit integers, e.g. mode indices or
sampled replay positions.
"""

GridValues: TypeAlias = FloatArray
"""``shape: (n, n)``

Point values of a real field on a periodic grid. Axis 0 runs along
``y``, axis 1 along ``x``, so ``values[j, i]`` is the value at
``(x_i, y_j) = (i dx, j dx)``.
"""

SpectralValues: TypeAlias = ComplexArray
"""``shape: (n, n)``

Fourier coefficients in full (Hermitian-redundant) storage, laid out like
:func:`scipy.fft.fft2` output and normalized so that the zero mode is the
field mean.
"""


"""
[CATEGORY]
Reinforcement learning
"""

Observation: TypeAlias = FloatArray
"""``shape: (2 n²,)``

A flattened, normalized velocity field: ``ux`` then ``uy``, row-major.
"""

ObservationBatch: TypeAlias = FloatArray
"""``shape: (batch, obs_dim)``"""

QValues: TypeAlias = FloatArray
"""``shape: (n_actions,)`` or ``(batch, n_actions)``

Action values emitted by one forward pass of a Q-network.
"""


"""
[CATEGORY]
Callables and paths
"""

SpectrumProfile: TypeAlias = Callable[[FloatArray], FloatArray]
"""A function mapping integer shell wavenumbers to non-negative shell
energies (before normalization to the requested total energy).
"""

StrPath: TypeAlias = Union[str, "PathLike[str]"]
"""A string or :class:`os.PathLike` representing a path to a
directory or file.
"""
