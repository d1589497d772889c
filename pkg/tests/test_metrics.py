from __future__ import annotations

import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from efrl.fields import GridSpec, VelocityField, leray_project
from efrl.metrics import (
    SpectrumStats,
    TimeSeries,
    energy_spectrum,
    enstrophy,
    err_energy,
    err_spectrum,
    filtered_dns_project,
    kinetic_energy,
    write_spectrum,
    write_timeseries,
)
from efrl.utils.exceptions import GridMismatchError
from efrl.utils.file_ops import read_csv


def shear(grid):
    return VelocityField.from_function(grid, lambda x, y: (np.sin(2 * np.pi * y), 0 * x))


def test_energy_and_enstrophy_of_shear():
    u = shear(GridSpec(32))
    assert kinetic_energy(u) == pytest.approx(0.25, rel=1e-13)
    assert enstrophy(u) == pytest.approx(np.pi**2, rel=1e-13)
    assert kinetic_energy(2.0 * u) == pytest.approx(4 * kinetic_energy(u), rel=1e-13)
    assert enstrophy(2.0 * u) == pytest.approx(4 * enstrophy(u), rel=1e-13)


def test_zero_field(grid16):
    u = VelocityField.zeros(grid16)
    assert kinetic_energy(u) == 0.0
    assert enstrophy(u) == 0.0


def test_single_mode_spectrum():
    grid = GridSpec(32)
    u = VelocityField.from_function(grid, lambda x, y: (0 * x, np.cos(2 * np.pi * 3 * x)))
    stats = energy_spectrum(u)
    assert stats.energy[3] == pytest.approx(kinetic_energy(u), rel=1e-12)
    others = np.delete(stats.energy, 3)
    assert np.abs(others).max() < 1e-25


def test_parseval_on_random_fields(rng):
    grid = GridSpec(32)
    for _ in range(100):
        u = VelocityField.from_stacked(grid, rng.standard_normal((2, 32, 32)))
        assert energy_spectrum(u).total() == pytest.approx(kinetic_energy(u), rel=1e-10)


def test_white_noise_spectrum_follows_mode_count(rng):
    grid = GridSpec(64)
    shells = grid.shell_index.ravel()
    counts = np.bincount(shells)
    total = np.zeros_like(counts, dtype=float)
    for _ in range(40):
        u = VelocityField.from_stacked(grid, rng.standard_normal((2, 64, 64)))
        total += energy_spectrum(u).energy
    per_mode = total / counts
    middle = slice(5, 30)
    assert_allclose(per_mode[middle], per_mode[middle].mean(), rtol=0.25)


def test_resolved_and_shells():
    stats = SpectrumStats(np.arange(6), np.array([9.0, 1.0, 2.0, 3.0, 4.0, 5.0]), n=8)
    resolved = stats.resolved()
    assert resolved.kappa.tolist() == [1, 2, 3, 4]
    assert stats.shells(6).tolist() == [1.0, 2.0, 3.0, 4.0, 5.0, 0.0]


def test_err_energy():
    assert err_energy([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
    assert err_energy([1.1, 2.2], [1.0, 2.0]) == pytest.approx(0.1)
    assert err_energy([1.0, 2.0], [2.0, 2.0]) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        err_energy([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        err_energy([1.0], [0.0])


def test_err_energy_matches_brute_force(rng):
    a = rng.uniform(0.1, 1.0, 50)
    b = rng.uniform(0.1, 1.0, 50)
    expected = sum(abs(x - y) / y for x, y in zip(a, b)) / 50
    assert err_energy(a, b) == pytest.approx(expected, rel=1e-12)


def _stats(energies, n=64, t=0.0):
    energies = np.asarray(energies, dtype=float)
    return SpectrumStats(np.arange(energies.size + 1), np.concatenate([[0.0], energies]), n, t)


def test_err_spectrum_cases():
    ref = [_stats(np.linspace(1.0, 2.0, 32))] * 3
    assert err_spectrum(ref, ref, 8) == 0.0
    ten = [_stats(10 * np.linspace(1.0, 2.0, 32))] * 3
    assert err_spectrum(ten, ref, 8) == pytest.approx(1.0)
    assert err_spectrum(ref, ten, 8, absolute=True) == pytest.approx(1.0)

    half = np.linspace(1.0, 2.0, 32)
    low = half.copy()
    low[:4] *= 0.1
    assert err_spectrum([_stats(low)], [_stats(half)], 8) == pytest.approx(-0.5)


def test_err_spectrum_matches_brute_force(rng):
    K = 8
    spectra = [_stats(rng.uniform(0.1, 2.0, 32)) for _ in range(20)]
    refs = [_stats(rng.uniform(0.1, 2.0, 32)) for _ in range(20)]
    total = 0.0
    for s, r in zip(spectra, refs):
        inner = 0.0
        for kappa in range(1, K + 1):
            inner += np.log10(s.energy[kappa] / r.energy[kappa])
        total += inner / K
    assert err_spectrum(spectra, refs, K) == pytest.approx(total / 20, rel=1e-12)


def test_err_spectrum_skips_empty_shells(caplog):
    ref = _stats(np.ones(32))
    holed = np.ones(32)
    holed[2] = 0.0
    with caplog.at_level(logging.WARNING, logger="efrl"):
        value = err_spectrum([_stats(holed)], [ref], 8)
    assert value == 0.0
    assert "non-positive" in caplog.text


def test_err_spectrum_caps_k(caplog):
    small = _stats(np.ones(8), n=16)
    with caplog.at_level(logging.WARNING, logger="efrl"):
        assert err_spectrum([small], [small], 32) == 0.0
    assert "exceeds" in caplog.text


def test_filtered_dns_exact_on_coarse_modes():
    fine, coarse = GridSpec(64), GridSpec(16)
    func = lambda x, y: (np.sin(2 * np.pi * 3 * y), np.cos(2 * np.pi * 5 * x))
    u_fine = VelocityField.from_function(fine, func)
    u_coarse = filtered_dns_project(u_fine, coarse)
    assert_allclose(u_coarse.stacked, u_fine.stacked[:, ::4, ::4], atol=1e-12)
    again = filtered_dns_project(u_coarse, coarse)
    assert_allclose(again.stacked, u_coarse.stacked, atol=1e-13)


def test_filtered_dns_energy_and_commutation(rng):
    fine, coarse = GridSpec(64), GridSpec(16)
    u = VelocityField.from_stacked(fine, rng.standard_normal((2, 64, 64)))
    projected = filtered_dns_project(u, coarse)
    assert kinetic_energy(projected) <= kinetic_energy(u)
    a = filtered_dns_project(leray_project(u), coarse)
    b = leray_project(filtered_dns_project(u, coarse))
    assert_allclose(a.stacked, b.stacked, atol=1e-12)


def test_filtered_dns_rejects_incompatible_grids():
    u = VelocityField.zeros(GridSpec(64))
    with pytest.raises(GridMismatchError):
        filtered_dns_project(u, GridSpec(16, side=2.0))
    with pytest.raises(GridMismatchError):
        filtered_dns_project(VelocityField.zeros(GridSpec(16)), GridSpec(32))


def test_exports(tmp_path):
    grid = GridSpec(16)
    series = TimeSeries()
    series.record(0.0, shear(grid))
    series.record(0.001, shear(grid), 1e-3)
    path = write_timeseries(tmp_path / "timeseries.csv", series)
    rows = read_csv(path)
    assert [r["t"] for r in rows] == ["0.0", "0.001"]
    assert float(rows[0]["energy"]) == pytest.approx(0.25)

    spectrum_path = write_spectrum(tmp_path / "spectra", energy_spectrum(shear(grid), 0.5))
    assert spectrum_path.name == "spectrum_t0.500.csv"
    rows = read_csv(spectrum_path)
    assert [int(r["kappa"]) for r in rows] == list(range(1, 9))
    assert float(rows[0]["energy"]) == pytest.approx(0.25)
