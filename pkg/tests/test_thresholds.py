"""Dichotomy cubic, classification cases, Galilean reduction.

The root solver is cross-checked against an independent dense-grid
bisection written here from scratch, and against the closed forms

    me = 0   -> lam_- = 0,   lam = 3/2
    me = 1/2 -> lam_- = 1/2, lam = (1 + sqrt 3)/2
    a Q data -> me = 3a^4 - 2a^6, eta0 = a^2.
"""

import numpy as np
import pytest

from nlslab.errors import BoundaryExcludedError, UndefinedTransformError
from nlslab.field import Field, raw_invariants
from nlslab.grid import Grid, PERIODIC3D
from nlslab.groundstate import sample_soliton
from nlslab.thresholds import (
    CASE_BLOWUP,
    CASE_GLOBAL,
    CASE_NOT_COVERED,
    Classification,
    classify,
    galilean_reduce,
    solve_lambda,
)

from conftest import gaussian_periodic, gaussian_radial


def cubic(x):
    return 3.0 * x * x - 2.0 * x**3


def dense_roots(me, n=400_001):
    """Oracle: sign changes of the cubic on a fine grid, then refinement."""
    x = np.linspace(0.0, 4.0, n)
    y = cubic(x) - me
    segs = np.nonzero(np.sign(y[:-1]) * np.sign(y[1:]) < 0)[0]
    roots = []
    for i in segs:
        lo, hi = x[i], x[i + 1]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if (cubic(lo) - me) * (cubic(mid) - me) <= 0:
                hi = mid
            else:
                lo = mid
        roots.append(0.5 * (lo + hi))
    return roots


# ---------------------------------------------------------------------------
# root solver
# ---------------------------------------------------------------------------

def test_closed_form_roots():
    lm, lp = solve_lambda(0.0)
    assert lm == pytest.approx(0.0, abs=1e-11)
    assert lp == pytest.approx(1.5, abs=1e-11)

    lm, lp = solve_lambda(0.5)
    assert lm == pytest.approx(0.5, abs=1e-11)
    assert lp == pytest.approx((1.0 + np.sqrt(3.0)) / 2.0, abs=1e-11)


def test_negative_ratio_has_single_root():
    lm, lp = solve_lambda(-1.0)
    assert lm is None
    assert lp > 1.5
    assert cubic(lp) == pytest.approx(-1.0, abs=1e-10)


def test_roots_match_dense_bisection():
    rng = np.random.default_rng(20260823)
    ratios = rng.uniform(-2.0, 1.0 - 1e-6, size=100)
    for me in ratios:
        lm, lp = solve_lambda(float(me))
        oracle = dense_roots(float(me))
        if me >= 0.0:
            assert lm is not None
            assert lm == pytest.approx(oracle[0], abs=1e-11)
            assert lp == pytest.approx(oracle[-1], abs=1e-11)
        else:
            assert lm is None
            assert lp == pytest.approx(oracle[0], abs=1e-11)
        # And the roots really solve the cubic.
        assert cubic(lp) == pytest.approx(me, abs=1e-9)


def test_root_ordering_property():
    rng = np.random.default_rng(7)
    for me in rng.uniform(1e-6, 1.0 - 1e-6, size=50):
        lm, lp = solve_lambda(float(me))
        assert 0.0 <= lm < 1.0 < lp


def test_boundary_ratios_rejected():
    for me in (1.0, 1.0 - 1e-13, 1.5):
        with pytest.raises(BoundaryExcludedError):
            solve_lambda(me)


# ---------------------------------------------------------------------------
# classification of sampled data
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("a,case", [
    (0.6, CASE_GLOBAL),
    (0.9, CASE_GLOBAL),
    (1.1, CASE_BLOWUP),
    (1.3, CASE_BLOWUP),
])
def test_aq_data_lands_on_root(q, radial_grid, a, case):
    f = Field(radial_grid, a * q.evaluate(radial_grid.radii()).astype(complex))
    cls = classify(f, q)
    me_expect = 3.0 * a**4 - 2.0 * a**6
    assert cls.me_ratio == pytest.approx(me_expect, abs=1e-6)
    assert cls.eta0 == pytest.approx(a * a, abs=1e-5)
    assert cls.case == case
    # a Q sits exactly on one of the roots.
    root = cls.lambda_minus if a < 1.0 else cls.lam
    assert cls.eta0 == pytest.approx(root, abs=1e-4)


def test_ground_state_itself_is_boundary(q, radial_grid):
    f = sample_soliton(q, radial_grid)
    with pytest.raises(BoundaryExcludedError):
        classify(f, q)


def test_small_gaussian_is_global(q, small_periodic):
    f = Field(small_periodic, 0.05 * gaussian_periodic(small_periodic))
    cls = classify(f, q)
    assert cls.case == CASE_GLOBAL
    assert cls.eta0 < cls.lambda_minus + 1e-4


def test_under_resolved_spike_lands_in_gap(q, tiny_periodic):
    # Exact invariants can never sit strictly between the roots: the
    # sharp interpolation inequality forces me >= 3 eta^2 - 2 eta^3,
    # which puts every field on the global or blow-up side. The gap
    # case only appears when discretization misrepresents a field, and
    # a spike narrower than one cell does exactly that on a periodic
    # grid: the spectral gradient is band-limited while the pointwise
    # |u|^4 sum keeps the full spike height, so the discrete quotient
    # beats the ground-state constant (by about 1.2x at w = 0.8h) and
    # eta lands between the roots.
    g = tiny_periodic
    X, Y, Z = g.meshes()
    w = 0.8 * g.spacing
    vals = 2.3 * np.exp(-(X * X + Y * Y + Z * Z) / w**2)
    cls = classify(Field(g, vals.astype(complex)), q)
    assert cls.case == CASE_NOT_COVERED
    assert cls.lambda_minus + 1e-3 < cls.eta0 < cls.lam - 1e-3
    assert "between the roots" in cls.note


# ---------------------------------------------------------------------------
# Galilean reduction
# ---------------------------------------------------------------------------

def test_boost_zeroes_momentum_and_lowers_energy(small_periodic):
    g = small_periodic
    X, _, _ = g.meshes()
    vals = gaussian_periodic(g, 1.0, 1.3) * np.exp(0.5j * X)
    f = Field(g, vals)
    before = raw_invariants(f)
    boosted, xi0 = galilean_reduce(f)
    after = raw_invariants(boosted)
    psq = float(np.dot(before["momentum"], before["momentum"]))

    assert np.allclose(xi0, -np.array(before["momentum"]) / before["mass"])
    assert np.max(np.abs(after["momentum"])) < 1e-8
    assert after["mass"] == pytest.approx(before["mass"], rel=1e-12)
    assert after["energy"] == pytest.approx(
        before["energy"] - psq / (2.0 * before["mass"]), rel=1e-10
    )
    assert after["grad_sq"] == pytest.approx(
        before["grad_sq"] - psq / before["mass"], rel=1e-10
    )


def test_boost_noop_for_zero_momentum(radial_grid, small_periodic):
    # Radial symmetry carries no momentum, so the boost is the identity.
    f = Field(radial_grid, gaussian_radial(radial_grid))
    boosted, xi0 = galilean_reduce(f)
    assert xi0 == (0.0, 0.0, 0.0)
    assert np.array_equal(boosted.values, f.values)
    # A real periodic field only has momentum at the roundoff floor
    # (width 2 so the unpaired Nyquist mode is empty); the boost phase
    # it induces must stay at the roundoff floor too.
    fp = Field(small_periodic, gaussian_periodic(small_periodic, width=2.0))
    boosted, xi0 = galilean_reduce(fp)
    assert np.allclose(xi0, 0.0, atol=1e-13)
    assert np.allclose(boosted.values, fp.values, rtol=0, atol=1e-12)


def test_classify_with_galilean_records_boost(q, small_periodic):
    g = small_periodic
    X, _, _ = g.meshes()
    vals = 0.10 * gaussian_periodic(g, 1.0, 1.2) * np.exp(0.4j * X)
    cls = classify(Field(g, vals), q, apply_galilean=True)
    assert cls.galilean_applied
    assert cls.xi0[0] == pytest.approx(-0.4, abs=1e-6)
    plain = classify(Field(g, vals), q)
    # Removing momentum can only shrink both coordinates.
    assert cls.me_ratio <= plain.me_ratio + 1e-12
    assert cls.eta0 <= plain.eta0 + 1e-12


def test_boost_rejects_zero_mass(small_periodic):
    f = Field(small_periodic, np.zeros(small_periodic.shape, dtype=complex))
    with pytest.raises(UndefinedTransformError):
        galilean_reduce(f)
