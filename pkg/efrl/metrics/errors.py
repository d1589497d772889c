"""Time-averaged global errors against a reference run."""

from __future__ import annotations

__all__ = ["err_energy", "err_spectrum"]

from typing import Sequence

import numpy as np

from .. import logger
from .diagnostics import SpectrumStats


def err_energy(series: Sequence[float], series_ref: Sequence[float]) -> float:
    """Time average of the relative energy error ``|E_n - E_ref_n| / E_ref_n``.

    Parameters
    ----------
    series
        Kinetic energies of the run being judged, one per stored time.
    series_ref
        Reference energies at the same times.

    Raises
    ------
    :class:`ValueError`
        If the series differ in length, are empty, or a reference energy is
        not positive.

    Examples
    --------
    ::

        >>> err_energy([1.0, 2.0], [2.0, 2.0])
        0.25
    """
    values = np.asarray(series, dtype=np.float64)
    ref = np.asarray(series_ref, dtype=np.float64)
    if values.shape != ref.shape:
        raise ValueError(
            f"Energy series of lengths {values.size} and {ref.size} cannot be compared"
        )
    if values.size == 0:
        raise ValueError("Cannot average an error over an empty series")
    if not (ref > 0).all():
        raise ValueError("Reference energies must be positive")
    return float(np.mean(np.abs((values - ref) / ref)))


def err_spectrum(
    spectra: Sequence[SpectrumStats],
    spectra_ref: Sequence[SpectrumStats],
    K: int,
    absolute: bool = False,
) -> float:
    """Time average of the mean ``log10`` ratio of shell energies up to ``K``.

    The signed form lets over- and under-resolved shells compensate; with
    ``absolute=True`` the magnitude of every log ratio is averaged instead.

    Shells where either energy is not positive are left out of the average
    for that time, with a warning. ``K`` is capped at the last resolved shell
    ``n / 2``.

    Raises
    ------
    :class:`ValueError`
        If the sequences differ in length or are empty, or ``K < 1``.
    """
    if len(spectra) != len(spectra_ref):
        raise ValueError(
            f"{len(spectra)} spectra cannot be compared with {len(spectra_ref)}"
        )
    if not spectra:
        raise ValueError("Cannot average an error over an empty series")
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")

    upper = min(K, spectra[0].n // 2, spectra_ref[0].n // 2)
    if upper < K:
        logger.warning(
            "K = %(K)s exceeds the resolved shells; using K = %(upper)s",
            {"K": K, "upper": upper},
        )

    per_time = []
    excluded = 0
    for stats, ref in zip(spectra, spectra_ref):
        e = stats.shells(upper)
        e_ref = ref.shells(upper)
        usable = (e > 0) & (e_ref > 0)
        excluded += int(upper - usable.sum())
        if not usable.any():
            continue
        ratios = np.log10(e[usable] / e_ref[usable])
        if absolute:
            ratios = np.abs(ratios)
        per_time.append(ratios.mean())

    if excluded:
        logger.warning(
            "Left %(count)s non-positive shell energies out of err_spectrum",
            {"count": excluded},
        )
    if not per_time:
        return float("nan")
    return float(np.mean(per_time))
