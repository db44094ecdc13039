"""Grid conventions: axes, spacing, wavenumbers, quadrature."""

import numpy as np
import pytest

from nlslab.grid import Grid, PERIODIC3D, RADIAL1D


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------

def test_periodic_requires_power_of_two():
    with pytest.raises(ValueError):
        Grid(PERIODIC3D, 96, 8.0)
    Grid(PERIODIC3D, 64, 8.0)  # fine


def test_bad_kind_and_sizes():
    with pytest.raises(ValueError):
        Grid("cartesian2d", 64, 8.0)
    with pytest.raises(ValueError):
        Grid(RADIAL1D, 0, 8.0)
    with pytest.raises(ValueError):
        Grid(RADIAL1D, 64, -1.0)


def test_radial_n_need_not_be_power_of_two():
    g = Grid(RADIAL1D, 1000, 10.0)
    assert g.spacing == pytest.approx(0.01)


# ---------------------------------------------------------------------------
# coordinates
# ---------------------------------------------------------------------------

def test_periodic_axis_covers_half_open_box():
    g = Grid(PERIODIC3D, 8, 4.0)
    ax = g.axis()
    assert ax[0] == -4.0
    assert ax[-1] == pytest.approx(4.0 - g.spacing)
    assert np.allclose(np.diff(ax), g.spacing)


def test_radial_axis_excludes_origin_includes_rmax():
    g = Grid(RADIAL1D, 100, 5.0)
    r = g.radii()
    assert r[0] == pytest.approx(g.spacing)
    assert r[-1] == pytest.approx(5.0)
    assert np.all(r > 0)


def test_radius_mesh_matches_meshes():
    g = Grid(PERIODIC3D, 16, 3.0)
    X, Y, Z = g.meshes()
    assert np.allclose(g.radius_mesh(), np.sqrt(X**2 + Y**2 + Z**2))


def test_cached_arrays_are_read_only():
    g = Grid(PERIODIC3D, 16, 3.0)
    with pytest.raises(ValueError):
        g.radius_mesh()[0, 0, 0] = 1.0
    with pytest.raises(ValueError):
        Grid(RADIAL1D, 64, 4.0).quad_weights()[0] = 0.0


# ---------------------------------------------------------------------------
# spectral data
# ---------------------------------------------------------------------------

def test_wavenumbers_resolve_integer_modes():
    # On [-L, L) the admissible wavenumbers are multiples of pi/L.
    g = Grid(PERIODIC3D, 32, 4.0)
    k = g.wavenumbers()
    base = np.pi / 4.0
    assert np.allclose(np.sort(k / base), np.arange(-16, 16))


def test_ksq_mesh_diagonal_entry():
    g = Grid(PERIODIC3D, 16, 2.0)
    k = g.wavenumbers()
    assert g.ksq_mesh()[1, 2, 3] == pytest.approx(k[1] ** 2 + k[2] ** 2 + k[3] ** 2)


def test_dealias_mask_keeps_inner_two_thirds():
    g = Grid(PERIODIC3D, 32, 4.0)
    k = np.abs(g.wavenumbers())
    keep = k <= (2.0 / 3.0) * k.max()
    m = g.dealias_mask()
    assert m.shape == g.shape
    assert np.array_equal(m[:, 0, 0], keep)
    # The mask must kill the highest mode on each axis.
    imax = int(np.argmax(k))
    assert not m[imax, 0, 0]


def test_wavenumbers_rejected_on_radial():
    with pytest.raises(ValueError):
        Grid(RADIAL1D, 64, 4.0).wavenumbers()


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def test_periodic_integrate_gaussian():
    # integral of exp(-|x|^2) over R^3 is pi^(3/2); the box tail is negligible.
    g = Grid(PERIODIC3D, 64, 8.0)
    X, Y, Z = g.meshes()
    val = g.integrate(np.exp(-(X**2 + Y**2 + Z**2)))
    assert val == pytest.approx(np.pi**1.5, rel=1e-12)


def test_radial_integrate_gaussian():
    g = Grid(RADIAL1D, 4096, 16.0)
    r = g.radii()
    val = g.integrate(np.exp(-(r**2)))
    assert val == pytest.approx(np.pi**1.5, rel=1e-9)


def test_radial_weights_shape_and_endpoint():
    g = Grid(RADIAL1D, 128, 4.0)
    w = g.quad_weights()
    r = g.radii()
    h = g.spacing
    assert np.allclose(w[:-1], 4.0 * np.pi * h * r[:-1] ** 2)
    assert w[-1] == pytest.approx(2.0 * np.pi * h * r[-1] ** 2)


def test_quad_weights_rejected_on_periodic():
    with pytest.raises(ValueError):
        Grid(PERIODIC3D, 16, 4.0).quad_weights()
