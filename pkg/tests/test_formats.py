"""Binary and text codecs: round trips, determinism, corruption errors."""

import numpy as np
import pytest

from nlslab.errors import FormatError
from nlslab.field import Field
from nlslab.formats import (
    read_csv,
    read_nlsf,
    read_nlsq,
    write_csv,
    write_nlsf,
    write_nlsq,
)
from nlslab.grid import Grid, PERIODIC3D, RADIAL1D
from nlslab.series import COLUMNS, DiagnosticSeries

from conftest import gaussian_radial


HEADER_BYTES = 29  # 4s magic + u32 + u8 + u32 + 2 f64


def _random_field(grid, seed):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return Field(grid, vals, t=0.375)


def _series(nrows=4, seed=5):
    rng = np.random.default_rng(seed)
    s = DiagnosticSeries()
    for i in range(nrows):
        s.append(
            momentum=tuple(rng.standard_normal(3)),
            **{c: (float(i) if c == "t" else float(rng.standard_normal()))
               for c in COLUMNS},
        )
    return s


# ---------------------------------------------------------------------------
# NLSF snapshots
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("kind,n,L", [(RADIAL1D, 777, 18.5), (PERIODIC3D, 16, 6.0)])
def test_nlsf_roundtrip_bit_identical(tmp_path, kind, n, L):
    f = _random_field(Grid(kind, n, L), seed=3)
    p = tmp_path / "snap.nlsf"
    write_nlsf(f, p)
    g = read_nlsf(p)
    assert g.grid == f.grid
    assert g.t == f.t
    assert np.array_equal(g.values, f.values)  # exact, not approx


def test_nlsf_file_size(tmp_path):
    g = Grid(RADIAL1D, 100, 5.0)
    p = tmp_path / "s.nlsf"
    write_nlsf(Field(g, np.zeros(100, dtype=complex)), p)
    assert p.stat().st_size == HEADER_BYTES + 100 * 16


def test_nlsf_write_is_deterministic(tmp_path):
    f = _random_field(Grid(PERIODIC3D, 8, 4.0), seed=9)
    p1, p2 = tmp_path / "a.nlsf", tmp_path / "b.nlsf"
    write_nlsf(f, p1)
    write_nlsf(f, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_nlsf_corruption_errors(tmp_path):
    f = _random_field(Grid(RADIAL1D, 64, 8.0), seed=1)
    p = tmp_path / "snap.nlsf"
    write_nlsf(f, p)
    raw = bytearray(p.read_bytes())

    bad = tmp_path / "bad.nlsf"
    bad.write_bytes(raw[:10])  # truncated header
    with pytest.raises(FormatError, match="truncated header"):
        read_nlsf(bad)

    bad.write_bytes(raw[:-16])  # one sample short
    with pytest.raises(FormatError, match="truncated payload"):
        read_nlsf(bad)

    mutated = raw.copy()
    mutated[0:4] = b"XXXX"
    bad.write_bytes(mutated)
    with pytest.raises(FormatError, match="magic"):
        read_nlsf(bad)

    mutated = raw.copy()
    mutated[4] = 99  # version field
    bad.write_bytes(mutated)
    with pytest.raises(FormatError, match="version"):
        read_nlsf(bad)

    mutated = raw.copy()
    mutated[8] = 7  # kind code
    bad.write_bytes(mutated)
    with pytest.raises(FormatError, match="kind"):
        read_nlsf(bad)


def test_nlsf_rejects_invalid_grid_header(tmp_path):
    # periodic kind with non-power-of-two n must fail grid validation
    f = _random_field(Grid(RADIAL1D, 100, 8.0), seed=2)
    p = tmp_path / "snap.nlsf"
    write_nlsf(f, p)
    raw = bytearray(p.read_bytes())
    raw[8] = 0  # relabel radial payload as periodic3d, n=100 not a power of 2
    bad = tmp_path / "bad.nlsf"
    bad.write_bytes(raw)
    with pytest.raises(FormatError, match="invalid grid"):
        read_nlsf(bad)


# ---------------------------------------------------------------------------
# NLSQ profiles
# ---------------------------------------------------------------------------

def test_nlsq_roundtrip_preserves_evaluate(tmp_path, q):
    p = tmp_path / "ground.nlsq"
    write_nlsq(q, p)
    q2 = read_nlsq(p)
    assert q2.mass_sq == q.mass_sq
    assert q2.grad_sq == q.grad_sq
    assert q2.shoot_value == q.shoot_value
    assert np.array_equal(q2.r_grid, q.r_grid)
    assert np.array_equal(q2.profile, q.profile)
    # evaluate() must agree everywhere that matters: spline region, tail,
    # and past r_max.
    r_probe = np.array([0.0, 0.37, 1.0, 5.0, q.r_match + 1.0, 19.9, 25.0])
    assert np.allclose(q2.evaluate(r_probe), q.evaluate(r_probe), rtol=1e-9, atol=1e-300)


def test_nlsq_write_is_deterministic(tmp_path, q):
    p1, p2 = tmp_path / "a.nlsq", tmp_path / "b.nlsq"
    write_nlsq(q, p1)
    write_nlsq(q, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_nlsq_corruption_errors(tmp_path, q):
    p = tmp_path / "ground.nlsq"
    write_nlsq(q, p)
    lines = p.read_text().splitlines()

    bad = tmp_path / "bad.nlsq"
    bad.write_text("\n".join(["# wrong"] + lines[1:]) + "\n")
    with pytest.raises(FormatError, match="NLSQ"):
        read_nlsq(bad)

    bad.write_text("\n".join(lines[:50]) + "\n")  # truncated profile
    with pytest.raises(FormatError, match="pairs"):
        read_nlsq(bad)

    mangled = list(lines)
    mangled[10] = "not a number at all"
    bad.write_text("\n".join(mangled) + "\n")
    with pytest.raises(FormatError):
        read_nlsq(bad)


# ---------------------------------------------------------------------------
# CSV series
# ---------------------------------------------------------------------------

def test_csv_roundtrip(tmp_path):
    s = _series()
    p = tmp_path / "diag.csv"
    write_csv(s, p)
    s2 = read_csv(p)
    assert len(s2) == len(s)
    for c in COLUMNS:
        assert np.array_equal(s2.column(c), s.column(c))  # 17g is lossless
    # momentum stays in memory only; the reader backfills zeros
    assert all(m == (0.0, 0.0, 0.0) for m in s2.momentum)


def test_csv_nan_survives_roundtrip(tmp_path):
    s = DiagnosticSeries()
    row = {c: 1.0 for c in COLUMNS}
    row["variance"] = float("nan")
    s.append(**row)
    p = tmp_path / "diag.csv"
    write_csv(s, p)
    s2 = read_csv(p)
    assert np.isnan(s2.column("variance")[0])
    assert s2.column("mass")[0] == 1.0


def test_csv_header_and_field_errors(tmp_path):
    s = _series(2)
    p = tmp_path / "diag.csv"
    write_csv(s, p)
    lines = p.read_text().splitlines()

    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(["time,stuff"] + lines[1:]) + "\n")
    with pytest.raises(FormatError, match="header"):
        read_csv(bad)

    bad.write_text("\n".join([lines[0], lines[1] + ",0.0"]) + "\n")
    with pytest.raises(FormatError, match="fields"):
        read_csv(bad)

    mangled = lines[1].replace(lines[1].split(",")[2], "oops", 1)
    bad.write_text("\n".join([lines[0], mangled]) + "\n")
    with pytest.raises(FormatError, match="bad number"):
        read_csv(bad)


def test_series_column_access():
    s = _series(3)
    assert len(s.times) == 3
    assert s.times[0] == 0.0
    with pytest.raises(KeyError):
        s.column("nope")
    with pytest.raises(ValueError):
        s.append(t=1.0)  # missing the other columns
