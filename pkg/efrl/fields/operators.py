"""Spectral transforms and differential operators on periodic fields.

Transforms use the ``"forward"`` normalization of :mod:`scipy.fft`, so Fourier
coefficients do not depend on the grid size and Parseval reads

.. math::

    \\Delta x^2 \\sum_j |f_j|^2 = L^2 \\sum_m |\\hat f_m|^2 .

First derivatives use the derivative wavenumbers of :class:`~.GridSpec`
(unpaired Nyquist mode dropped); the Leray projector uses the same ones, so the
spectral divergence of a projected field vanishes to round-off.
"""

from __future__ import annotations

__all__ = [
    "dft_forward",
    "dft_inverse",
    "leray_project",
    "divergence",
    "vorticity",
    "grad_norm",
    "l2_norm",
    "dealias",
    "dealias_mask",
    "velocity_hat",
    "velocity_from_hat",
    "project_hat",
    "advection_hat",
    "enforce_hermitian",
]

from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
from scipy import fft as sp_fft

from ..utils.exceptions import BlowUpError
from .grid import GridSpec, RealField, SpectralField, VelocityField, mode_numbers

if TYPE_CHECKING:
    from ..typing import ComplexArray, FloatArray


def _require_finite(values: FloatArray, what: str) -> None:
    if not np.isfinite(values).all():
        raise BlowUpError(f"Non-finite values in {what}")


def dft_forward(f: RealField) -> SpectralField:
    """Fourier coefficients of a real field.

    Raises
    ------
    :class:`~.BlowUpError`
        If ``f`` holds non-finite values.
    """
    _require_finite(f.values, "field handed to dft_forward")
    return SpectralField(f.grid, sp_fft.fft2(f.values, norm="forward"))


def dft_inverse(F: SpectralField) -> RealField:
    """Point values of the field with coefficients ``F``.

    The imaginary part is discarded, which keeps the Hermitian part of ``F``.
    """
    return RealField(F.grid, sp_fft.ifft2(F.coeffs, norm="forward").real)


def velocity_hat(u: VelocityField) -> ComplexArray:
    """``shape: (2, n, n)`` coefficients of ``(ux, uy)``."""
    stacked = u.stacked
    _require_finite(stacked, "velocity field")
    return sp_fft.fft2(stacked, axes=(-2, -1), norm="forward")


def velocity_from_hat(grid: GridSpec, u_hat: ComplexArray) -> VelocityField:
    return VelocityField.from_stacked(
        grid, sp_fft.ifft2(u_hat, axes=(-2, -1), norm="forward").real
    )


def enforce_hermitian(F: ComplexArray) -> ComplexArray:
    """Hermitian part of ``F`` over its last two axes: ``(F[m] + conj F[-m]) / 2``."""
    reflected = np.roll(np.flip(F, axis=(-2, -1)), 1, axis=(-2, -1))
    return 0.5 * (F + np.conj(reflected))


def project_hat(grid: GridSpec, u_hat: ComplexArray) -> ComplexArray:
    """Apply ``I - kk^T / k^T k`` mode by mode; the mean mode passes unchanged."""
    kx, ky = grid.derivative_wavenumbers
    k2 = grid.derivative_k_squared
    safe_k2 = np.where(k2 == 0.0, 1.0, k2)
    k_dot_u = (kx * u_hat[0] + ky * u_hat[1]) / safe_k2
    return np.stack([u_hat[0] - kx * k_dot_u, u_hat[1] - ky * k_dot_u])


def leray_project(u: VelocityField) -> VelocityField:
    """Divergence-free part of ``u``.

    Linear, idempotent and non-expansive; the identity on fields whose spectral
    divergence already vanishes.

    Examples
    --------
    ::

        >>> grid = GridSpec(16)
        >>> grad_phi = VelocityField.from_function(
        ...     grid, lambda x, y: (np.cos(2 * np.pi * x), np.zeros_like(y))
        ... )
        >>> np.abs(leray_project(grad_phi).stacked).max() < 1e-14
        True
    """
    return velocity_from_hat(u.grid, project_hat(u.grid, velocity_hat(u)))


def divergence(u: VelocityField) -> RealField:
    kx, ky = u.grid.derivative_wavenumbers
    u_hat = velocity_hat(u)
    return dft_inverse(SpectralField(u.grid, 1j * (kx * u_hat[0] + ky * u_hat[1])))


def vorticity(u: VelocityField) -> RealField:
    """Scalar vorticity ``d(uy)/dx - d(ux)/dy``."""
    kx, ky = u.grid.derivative_wavenumbers
    u_hat = velocity_hat(u)
    return dft_inverse(SpectralField(u.grid, 1j * (kx * u_hat[1] - ky * u_hat[0])))


def grad_norm(u: VelocityField) -> float:
    """L2 norm over the domain of the full velocity gradient tensor."""
    u_hat = velocity_hat(u)
    density = u.grid.derivative_k_squared * (np.abs(u_hat) ** 2).sum(axis=0)
    return float(u.grid.side * np.sqrt(density.sum()))


def l2_norm(u: VelocityField) -> float:
    """L2 norm over the domain, ``sqrt(int |u|^2 dx)``."""
    return float(u.grid.dx * np.sqrt((u.stacked**2).sum()))


@lru_cache(maxsize=16)
def _dealias_mask(n: int) -> FloatArray:
    keep = np.abs(mode_numbers(n)) <= n / 3
    mask = np.outer(keep, keep).astype(np.float64)
    mask.flags.writeable = False
    return mask


def dealias_mask(grid: GridSpec) -> FloatArray:
    """``1`` where both mode indices satisfy ``|m| <= n/3``, else ``0``."""
    return _dealias_mask(grid.n)


def dealias(F: SpectralField) -> SpectralField:
    """Two-thirds rule: zero every coefficient with ``|m| > n/3`` in either index."""
    return SpectralField(F.grid, F.coeffs * dealias_mask(F.grid))


def advection_hat(grid: GridSpec, u_hat: ComplexArray) -> ComplexArray:
    """Dealiased coefficients of ``(u . grad) u`` for a velocity given by ``u_hat``."""
    kx, ky = grid.derivative_wavenumbers
    u = sp_fft.ifft2(u_hat, axes=(-2, -1), norm="forward").real
    du_dx = sp_fft.ifft2(1j * kx * u_hat, axes=(-2, -1), norm="forward").real
    du_dy = sp_fft.ifft2(1j * ky * u_hat, axes=(-2, -1), norm="forward").real
    product = u[0] * du_dx + u[1] * du_dy
    product_hat = sp_fft.fft2(product, axes=(-2, -1), norm="forward")
    return enforce_hermitian(product_hat * dealias_mask(grid))
