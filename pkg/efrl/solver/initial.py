"""Random initial conditions for decaying two-dimensional turbulence."""

from __future__ import annotations

__all__ = [
    "decaying_spectrum",
    "init_decaying_turbulence",
    "init_filtered_pair",
]

from typing import TYPE_CHECKING

import numpy as np

from .. import logger
from ..constants import DEFAULT_KAPPA_PEAK, TAU
from ..fields.grid import GridSpec, VelocityField, mode_numbers
from ..fields.operators import enforce_hermitian, project_hat, velocity_from_hat
from ..metrics.diagnostics import filtered_dns_project

if TYPE_CHECKING:
    from ..typing import FloatArray, SpectrumProfile


def decaying_spectrum(kappa_peak: float = DEFAULT_KAPPA_PEAK) -> SpectrumProfile:
    """The shell profile ``kappa**4 * exp(-2 (kappa / kappa_peak)**2)``.

    Its maximum sits at ``kappa = kappa_peak``. The overall constant is fixed
    later by the requested total energy.
    """
    if not kappa_peak > 0:
        raise ValueError(f"Peak wavenumber must be positive, got {kappa_peak}")

    def profile(kappa: FloatArray) -> FloatArray:
        kappa = np.asarray(kappa, dtype=np.float64)
        return kappa**4 * np.exp(-2.0 * (kappa / kappa_peak) ** 2)

    return profile


def init_decaying_turbulence(
    grid: GridSpec,
    spectrum_profile: SpectrumProfile,
    total_energy: float,
    seed: int,
) -> VelocityField:
    """Sample a divergence-free field with a prescribed shell spectrum.

    Every mode of shells ``1..n/2`` receives an amplitude ``sqrt(2 E(kappa))``
    with a uniformly random phase and a uniformly random direction. The
    coefficients are made Hermitian, projected onto divergence-free fields and
    each shell is rescaled so its energy is exactly ``E(kappa)``. The profile is
    normalized so the shells sum to ``total_energy``.

    Parameters
    ----------
    grid
        The grid to sample on.
    spectrum_profile
        Non-negative shell energies up to a constant, see :func:`decaying_spectrum`.
    total_energy
        Kinetic energy of the result.
    seed
        Seed of the :func:`numpy.random.default_rng` generator; equal seeds give
        bit-identical fields.

    Returns
    -------
    :class:`~.VelocityField`
        The field, zero when ``total_energy`` or the profile vanishes.

    Raises
    ------
    :class:`ValueError`
        If the energy or any profile value is negative or not finite.
    """
    if total_energy < 0:
        raise ValueError(f"Total energy must be non-negative, got {total_energy}")
    kappa = np.arange(1, grid.n // 2 + 1, dtype=np.float64)
    weights = np.asarray(spectrum_profile(kappa), dtype=np.float64)
    if not np.isfinite(weights).all() or (weights < 0).any():
        raise ValueError("Spectrum profile must be finite and non-negative")
    if total_energy == 0 or weights.sum() == 0:
        return VelocityField.zeros(grid)
    target = np.zeros(grid.n // 2 + 1)
    target[1:] = total_energy * weights / weights.sum()

    rng = np.random.default_rng(seed)
    shells = grid.shell_index
    nyquist = mode_numbers(grid.n) == -grid.n // 2
    active = (shells >= 1) & (shells <= grid.n // 2)
    active &= ~nyquist[:, None] & ~nyquist[None, :]

    phase = np.exp(1j * TAU * rng.random(grid.shape))
    theta = TAU * rng.random(grid.shape)
    amplitude = np.sqrt(2.0 * target[np.minimum(shells, grid.n // 2)]) * active
    u_hat = np.stack([np.cos(theta), np.sin(theta)]) * amplitude * phase
    u_hat = project_hat(grid, enforce_hermitian(u_hat))

    density = 0.5 * grid.side**2 * (np.abs(u_hat) ** 2).sum(axis=0)
    measured = np.bincount(shells[active], weights=density[active], minlength=len(target))
    measured = measured[: len(target)]
    scale = np.zeros_like(target)
    filled = measured > 0
    scale[filled] = np.sqrt(target[filled] / measured[filled])
    empty = (target > 0) & ~filled
    if empty.any():
        logger.warning(
            "No divergence-free mode left in shells %(shells)s",
            {"shells": np.flatnonzero(empty).tolist()},
        )
    u_hat = u_hat * np.where(active, scale[np.minimum(shells, grid.n // 2)], 0.0)
    return velocity_from_hat(grid, u_hat)


def init_filtered_pair(
    fine: GridSpec,
    coarse: GridSpec,
    spectrum_profile: SpectrumProfile,
    total_energy: float,
    seed: int,
) -> tuple[VelocityField, VelocityField]:
    """The fine-grid initial condition and its coarse-grid restriction.

    Coarse runs start from the restriction so they share their initial
    condition with the filtered reference.
    """
    u_fine = init_decaying_turbulence(fine, spectrum_profile, total_energy, seed)
    return u_fine, filtered_dns_project(u_fine, coarse)
