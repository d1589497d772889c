"""Kinetic energy, enstrophy, shell spectra and the filtered-DNS restriction."""

from __future__ import annotations

__all__ = [
    "SpectrumStats",
    "kinetic_energy",
    "enstrophy",
    "energy_spectrum",
    "filtered_dns_project",
]

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from ..fields.grid import GridSpec, VelocityField, mode_numbers
from ..fields.operators import velocity_from_hat, velocity_hat
from ..utils.exceptions import GridMismatchError

if TYPE_CHECKING:
    from ..typing import FloatArray, IntArray


def kinetic_energy(u: VelocityField) -> float:
    """``E = 1/2 int |u|^2 dx``, by spectral quadrature.

    Examples
    --------
    ::

        >>> u = VelocityField.from_function(GridSpec(16), lambda x, y: (np.sin(2 * np.pi * y), 0 * x))
        >>> round(kinetic_energy(u), 12)
        0.25
    """
    u_hat = velocity_hat(u)
    return float(0.5 * u.grid.side**2 * (np.abs(u_hat) ** 2).sum())


def enstrophy(u: VelocityField) -> float:
    """``Z = 1/2 int omega^2 dx``, by spectral quadrature."""
    kx, ky = u.grid.derivative_wavenumbers
    u_hat = velocity_hat(u)
    omega_hat = kx * u_hat[1] - ky * u_hat[0]
    return float(0.5 * u.grid.side**2 * (np.abs(omega_hat) ** 2).sum())


@dataclass(frozen=True)
class SpectrumStats:
    """Shell-binned kinetic energy at one time.

    Shells are width one and centred on integers, in units of ``2 pi / side``:
    mode ``m`` belongs to shell ``kappa`` when ``kappa - 1/2 <= |m| < kappa + 1/2``.
    Every shell from 0 to the grid corner is kept, so :meth:`total` equals the
    kinetic energy; :meth:`resolved` keeps shells ``1..n/2``.
    """

    kappa: IntArray
    energy: FloatArray
    n: int
    """Points per side of the grid the spectrum was measured on."""

    time: float = 0.0

    def total(self) -> float:
        return float(self.energy.sum())

    def resolved(self) -> SpectrumStats:
        keep = (self.kappa >= 1) & (self.kappa <= self.n // 2)
        return SpectrumStats(self.kappa[keep], self.energy[keep], self.n, self.time)

    def shells(self, upper: int) -> FloatArray:
        """Energies of shells ``1..upper``; missing shells read as zero."""
        out = np.zeros(upper)
        for k, e in zip(self.kappa, self.energy):
            if 1 <= k <= upper:
                out[k - 1] = e
        return out


def energy_spectrum(u: VelocityField, time: float = 0.0) -> SpectrumStats:
    """Shell energy spectrum ``E(kappa)`` of ``u``.

    Each mode contributes ``side**2 |u_m|**2 / 2``, so the shells sum to
    :func:`kinetic_energy` (Parseval).
    """
    u_hat = velocity_hat(u)
    density = 0.5 * u.grid.side**2 * (np.abs(u_hat) ** 2).sum(axis=0)
    shells = u.grid.shell_index
    energy = np.bincount(shells.ravel(), weights=density.ravel())
    return SpectrumStats(np.arange(len(energy)), energy, u.grid.n, time)


def filtered_dns_project(u_fine: VelocityField, coarse: GridSpec) -> VelocityField:
    """Restrict a fine-grid field to a coarse grid by sharp spectral truncation.

    Fine modes with ``|m| < n_coarse / 2`` in both indices are kept, the rest
    (coarse Nyquist row and column included) dropped. Divergence-free input
    stays divergence-free, and the restriction commutes with
    :func:`~.leray_project`.

    Raises
    ------
    :class:`~.GridMismatchError`
        If the grids differ in side or the fine size is not a multiple of the
        coarse size.
    """
    fine = u_fine.grid
    if fine.side != coarse.side or fine.n % coarse.n:
        raise GridMismatchError(f"Cannot restrict a {fine} field onto {coarse}")
    m = mode_numbers(coarse.n)
    index = np.mod(m, fine.n)
    u_hat = velocity_hat(u_fine)[:, index[:, None], index[None, :]]
    nyquist = m == -coarse.n // 2
    u_hat[:, nyquist, :] = 0.0
    u_hat[:, :, nyquist] = 0.0
    return velocity_from_hat(coarse, u_hat)
