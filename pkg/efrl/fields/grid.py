"""Fields on a doubly periodic square grid."""

from __future__ import annotations

__all__ = [
    "GridSpec",
    "RealField",
    "VelocityField",
    "SpectralField",
    "mode_numbers",
]

from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Callable

import numpy as np
from scipy import fft as sp_fft

from ..constants import DEFAULT_SIDE, MIN_GRID_POINTS, TAU
from ..utils.exceptions import GridMismatchError

if TYPE_CHECKING:
    from ..typing import FloatArray, GridValues, IntArray, SpectralValues


@lru_cache(maxsize=16)
def mode_numbers(n: int) -> IntArray:
    """Integer mode numbers ``m`` of an ``n``-point transform, in FFT order.

    Examples
    --------
    ::

        >>> mode_numbers(8).tolist()
        [0, 1, 2, 3, -4, -3, -2, -1]
    """
    m = sp_fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)
    m.flags.writeable = False
    return m


@lru_cache(maxsize=16)
def _wavenumbers(n: int, side: float) -> tuple[FloatArray, ...]:
    m = mode_numbers(n).astype(np.float64)
    k = TAU / side * m
    # first derivatives drop the unpaired Nyquist mode so real fields stay real
    k_deriv = np.where(mode_numbers(n) == -n // 2, 0.0, k)
    kx, ky = np.meshgrid(k, k)
    kx_d, ky_d = np.meshgrid(k_deriv, k_deriv)
    arrays = (kx, ky, kx**2 + ky**2, kx_d, ky_d, kx_d**2 + ky_d**2)
    for a in arrays:
        a.flags.writeable = False
    return arrays


@dataclass(frozen=True)
class GridSpec:
    """An ``n`` by ``n`` periodic grid on a square of side ``side``.

    The wavenumber of mode index ``m`` is ``2 pi m / side`` for
    ``m`` in ``[-n/2, n/2)``.
    """

    n: int
    """Points per side, a power of two."""

    side: float = DEFAULT_SIDE
    """Side length of the periodic square."""

    def __post_init__(self) -> None:
        if self.n < MIN_GRID_POINTS or self.n & (self.n - 1):
            raise ValueError(
                f"Grid size must be a power of two >= {MIN_GRID_POINTS}, got {self.n}"
            )
        if not self.side > 0:
            raise ValueError(f"Grid side must be positive, got {self.side}")

    @property
    def dx(self) -> float:
        return self.side / self.n

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @property
    def kx(self) -> FloatArray:
        return _wavenumbers(self.n, self.side)[0]

    @property
    def ky(self) -> FloatArray:
        return _wavenumbers(self.n, self.side)[1]

    @property
    def k_squared(self) -> FloatArray:
        """``|kappa|^2`` for the Laplacian-type operators (diffusion, filter)."""
        return _wavenumbers(self.n, self.side)[2]

    @property
    def derivative_wavenumbers(self) -> tuple[FloatArray, FloatArray]:
        """``(kx, ky)`` used for first derivatives and the Leray projector."""
        arrays = _wavenumbers(self.n, self.side)
        return arrays[3], arrays[4]

    @property
    def derivative_k_squared(self) -> FloatArray:
        return _wavenumbers(self.n, self.side)[5]

    @property
    def shell_index(self) -> IntArray:
        """Integer shell of every mode: ``round(|m|)``."""
        m = mode_numbers(self.n)
        mx, my = np.meshgrid(m, m)
        return np.rint(np.sqrt(mx**2 + my**2)).astype(np.int64)

    def coordinates(self) -> tuple[GridValues, GridValues]:
        """Point coordinates ``(x, y)``, each of shape ``(n, n)``."""
        line = np.arange(self.n) * self.dx
        return np.meshgrid(line, line)

    def __str__(self) -> str:
        return f"{self.n}x{self.n} (side {self.side:g})"


@dataclass(frozen=True)
class RealField:
    """Point values of a scalar field."""

    grid: GridSpec
    values: GridValues

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise ValueError(
                f"Field of shape {values.shape} does not fit grid {self.grid}"
            )
        object.__setattr__(self, "values", values)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients of a scalar field.

    Full (Hermitian-redundant) storage in :func:`scipy.fft.fft2` layout,
    normalized so that ``coeffs[0, 0]`` is the mean of the field and
    ``dx**2 * sum(|f|**2) == side**2 * sum(|F|**2)``.
    """

    grid: GridSpec
    coeffs: SpectralValues

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.shape != self.grid.shape:
            raise ValueError(
                f"Coefficients of shape {coeffs.shape} do not fit grid {self.grid}"
            )
        object.__setattr__(self, "coeffs", coeffs)


@dataclass(frozen=True)
class VelocityField:
    """A two-component velocity field ``(ux, uy)``."""

    grid: GridSpec
    ux: RealField
    uy: RealField

    def __post_init__(self) -> None:
        if self.ux.grid != self.grid or self.uy.grid != self.grid:
            raise ValueError("Velocity components live on a different grid")

    @classmethod
    def from_arrays(cls, grid: GridSpec, ux: GridValues, uy: GridValues) -> VelocityField:
        return cls(grid, RealField(grid, ux), RealField(grid, uy))

    @classmethod
    def from_stacked(cls, grid: GridSpec, stacked: FloatArray) -> VelocityField:
        return cls.from_arrays(grid, stacked[0], stacked[1])

    @classmethod
    def zeros(cls, grid: GridSpec) -> VelocityField:
        return cls.from_arrays(grid, np.zeros(grid.shape), np.zeros(grid.shape))

    @classmethod
    def from_function(
        cls,
        grid: GridSpec,
        func: Callable[[GridValues, GridValues], tuple[GridValues, GridValues]],
    ) -> VelocityField:
        """Sample ``func(x, y) -> (ux, uy)`` at the grid points.

        Examples
        --------
        ::

            >>> grid = GridSpec(8)
            >>> u = VelocityField.from_function(
            ...     grid, lambda x, y: (np.sin(2 * np.pi * y), 0 * x)
            ... )
            >>> u.stacked.shape
            (2, 8, 8)
        """
        x, y = grid.coordinates()
        ux, uy = func(x, y)
        return cls.from_arrays(
            grid,
            np.broadcast_to(ux, grid.shape).copy(),
            np.broadcast_to(uy, grid.shape).copy(),
        )

    @property
    def stacked(self) -> FloatArray:
        """``shape: (2, n, n)``"""
        return np.stack([self.ux.values, self.uy.values])

    def is_finite(self) -> bool:
        return self.ux.is_finite() and self.uy.is_finite()

    def rms(self) -> float:
        """Root mean square of the speed, ``sqrt(mean(ux**2 + uy**2))``."""
        return float(np.sqrt(np.mean(self.ux.values**2 + self.uy.values**2)))

    def _check_same_grid(self, other: VelocityField) -> None:
        if other.grid != self.grid:
            raise GridMismatchError(f"Grids differ: {self.grid} and {other.grid}")

    def __add__(self, other: VelocityField) -> VelocityField:
        self._check_same_grid(other)
        return VelocityField.from_stacked(self.grid, self.stacked + other.stacked)

    def __sub__(self, other: VelocityField) -> VelocityField:
        self._check_same_grid(other)
        return VelocityField.from_stacked(self.grid, self.stacked - other.stacked)

    def __mul__(self, scalar: float) -> VelocityField:
        return VelocityField.from_stacked(self.grid, scalar * self.stacked)

    __rmul__ = __mul__
