from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from efrl.fields import (
    GridSpec,
    RealField,
    SpectralField,
    VelocityField,
    dealias,
    dft_forward,
    dft_inverse,
    divergence,
    grad_norm,
    l2_norm,
    leray_project,
    load_snapshot,
    mode_numbers,
    save_snapshot,
    velocity_hat,
    vorticity,
)
from efrl.utils.exceptions import BlowUpError, GridMismatchError, SnapshotFormatError

from .conftest import taylor_green


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(4)
    with pytest.raises(ValueError):
        GridSpec(24)
    with pytest.raises(ValueError):
        GridSpec(16, side=0.0)
    grid = GridSpec(64)
    assert grid.dx == pytest.approx(1 / 64)
    assert mode_numbers(8).tolist() == [0, 1, 2, 3, -4, -3, -2, -1]


def test_wavenumbers_follow_side():
    grid = GridSpec(8, side=2.0)
    assert_allclose(grid.kx[0, :4], np.pi * np.arange(4))
    assert_allclose(grid.ky[:4, 0], np.pi * np.arange(4))


def test_forward_of_zero_is_zero(grid16):
    F = dft_forward(RealField(grid16, np.zeros(grid16.shape)))
    assert not F.coeffs.any()


def test_forward_of_cosine_has_two_modes():
    grid = GridSpec(8)
    x, _ = grid.coordinates()
    F = dft_forward(RealField(grid, np.cos(2 * np.pi * x)))
    nonzero = np.argwhere(np.abs(F.coeffs) > 1e-12)
    assert sorted(map(tuple, nonzero)) == [(0, 1), (0, 7)]
    assert_allclose(F.coeffs[0, 1], 0.5)


def test_round_trip_and_parseval(grid16, rng):
    values = rng.standard_normal(grid16.shape)
    f = RealField(grid16, values)
    F = dft_forward(f)
    assert_allclose(dft_inverse(F).values, values, rtol=0, atol=1e-13)
    lhs = grid16.dx**2 * (values**2).sum()
    rhs = grid16.side**2 * (np.abs(F.coeffs) ** 2).sum()
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_forward_rejects_non_finite(grid16):
    values = np.zeros(grid16.shape)
    values[3, 4] = np.inf
    with pytest.raises(BlowUpError):
        dft_forward(RealField(grid16, values))


def test_leray_removes_gradients(grid16):
    phi_x = lambda x, y: 2 * np.pi * np.cos(2 * np.pi * x) * np.sin(4 * np.pi * y)
    phi_y = lambda x, y: 4 * np.pi * np.sin(2 * np.pi * x) * np.cos(4 * np.pi * y)
    grad_phi = VelocityField.from_function(grid16, lambda x, y: (phi_x(x, y), phi_y(x, y)))
    assert np.abs(leray_project(grad_phi).stacked).max() < 1e-12


def test_leray_identity_idempotent_and_non_expansive(grid16, random_field):
    tg = taylor_green(grid16)
    assert_allclose(leray_project(tg).stacked, tg.stacked, atol=1e-13)

    u = random_field(grid16)
    once = leray_project(u)
    twice = leray_project(once)
    assert_allclose(twice.stacked, once.stacked, atol=1e-13)
    assert l2_norm(once) <= l2_norm(u)
    assert np.abs(divergence(once).values).max() < 1e-12


def test_leray_is_linear(grid16, random_field):
    u, v = random_field(grid16), random_field(grid16)
    lhs = leray_project(2.0 * u + v)
    rhs = 2.0 * leray_project(u) + leray_project(v)
    assert_allclose(lhs.stacked, rhs.stacked, atol=1e-12)


def test_divergence_and_grad_norm_of_constant(grid16):
    u = VelocityField.from_function(grid16, lambda x, y: (0 * x + 1.5, 0 * y - 0.5))
    assert np.abs(divergence(u).values).max() < 1e-14
    assert grad_norm(u) == pytest.approx(0.0, abs=1e-14)


def test_shear_vorticity_and_grad_norm():
    grid = GridSpec(32)
    u = VelocityField.from_function(grid, lambda x, y: (np.sin(2 * np.pi * y), 0 * x))
    _, y = grid.coordinates()
    assert_allclose(vorticity(u).values, -2 * np.pi * np.cos(2 * np.pi * y), atol=1e-11)
    assert grad_norm(u) ** 2 == pytest.approx(2 * np.pi**2, rel=1e-12)


def test_taylor_green_is_divergence_free():
    u = taylor_green(GridSpec(32))
    assert np.abs(divergence(u).values).max() < 1e-12


@pytest.mark.parametrize("k", [1, 3, 5])
def test_spectral_derivative_of_sine(k):
    grid = GridSpec(16)
    u = VelocityField.from_function(grid, lambda x, y: (0 * x, np.sin(2 * np.pi * k * x)))
    x, _ = grid.coordinates()
    # the vorticity of (0, f(x)) is f'(x)
    assert_allclose(
        vorticity(u).values, 2 * np.pi * k * np.cos(2 * np.pi * k * x), atol=1e-11
    )


def test_dealias(grid16):
    coeffs = np.zeros(grid16.shape, dtype=complex)
    coeffs[0, 7] = 1.0  # mode (n/2 - 1, 0)
    coeffs[1, 1] = 1.0
    out = dealias(SpectralField(grid16, coeffs)).coeffs
    assert out[0, 7] == 0
    assert out[1, 1] == 1


def test_dealias_does_not_add_energy(grid16, rng):
    coeffs = rng.standard_normal(grid16.shape) + 1j * rng.standard_normal(grid16.shape)
    out = dealias(SpectralField(grid16, coeffs)).coeffs
    assert (np.abs(out) ** 2).sum() <= (np.abs(coeffs) ** 2).sum()


def test_velocity_arithmetic_checks_grids(grid16):
    u = VelocityField.zeros(grid16)
    with pytest.raises(GridMismatchError):
        u + VelocityField.zeros(GridSpec(32))
    assert (2 * taylor_green(grid16)).rms() == pytest.approx(2 * taylor_green(grid16).rms())


def test_velocity_hat_shape(grid16, random_field):
    assert velocity_hat(random_field(grid16)).shape == (2, 16, 16)


def test_snapshot_round_trip(tmp_path, grid16, random_field):
    u = random_field(grid16)
    path = save_snapshot(tmp_path / "step_000003", u, 0.003)
    loaded, t = load_snapshot(path)
    assert t == 0.003
    assert loaded.grid == grid16
    assert np.array_equal(loaded.stacked, u.stacked)


def test_snapshot_errors(tmp_path, grid16):
    path = save_snapshot(tmp_path / "snap", VelocityField.zeros(grid16), 0.0)
    data = path.read_bytes()

    (tmp_path / "truncated").write_bytes(data[:-8])
    with pytest.raises(SnapshotFormatError):
        load_snapshot(tmp_path / "truncated")

    (tmp_path / "magic").write_bytes(b"XXXX" + data[4:])
    with pytest.raises(SnapshotFormatError):
        load_snapshot(tmp_path / "magic")

    (tmp_path / "short").write_bytes(data[:10])
    with pytest.raises(SnapshotFormatError):
        load_snapshot(tmp_path / "short")
