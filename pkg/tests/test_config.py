"""Run-configuration parsing and initial-data construction."""

import numpy as np
import pytest

from nlslab.config import InitSpec, RunSpec, build_initial, parse_config
from nlslab.errors import ConfigError
from nlslab.field import Field, raw_invariants
from nlslab.formats import write_nlsf
from nlslab.grid import Grid, PERIODIC3D, RADIAL1D


FULL = """\
# blow-up study, radial
kind = radial1d
n = 1024
L = 20.0
dt0 = 1e-3
t_end = 2.5
cfl_alpha = 0.25
blowup_factor = 15
snapshot_every = 50
diag_every = 5
dealias = off
init = soliton a=1.2
R = 8.0
mode = radial
gamma = 0.05
galilean = on
c2 = 12.0
"""


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def minimal(**overrides):
    base = {
        "kind": "radial1d",
        "n": "512",
        "L": "20.0",
        "dt0": "1e-3",
        "t_end": "1.0",
        "init": "gaussian A=1.0 w=1.5",
    }
    base.update(overrides)
    return "\n".join(f"{k} = {v}" for k, v in base.items() if v is not None) + "\n"


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def test_full_config(tmp_path):
    spec = parse_config(write(tmp_path, FULL))
    assert spec.grid == Grid(RADIAL1D, 1024, 20.0)
    assert spec.evolve.dt0 == 1e-3
    assert spec.evolve.t_end == 2.5
    assert spec.evolve.cfl_alpha == 0.25
    assert spec.evolve.blowup_factor == 15.0
    assert spec.evolve.snapshot_every == 50
    assert spec.evolve.diag_every == 5
    assert spec.evolve.dealias is False
    assert spec.evolve.R == 8.0
    assert spec.init == InitSpec("soliton", {"a": 1.2})
    assert spec.mode == "radial"
    assert spec.gamma == 0.05
    assert spec.galilean is True
    assert spec.c2 == 12.0
    assert spec.q_path is None


def test_defaults(tmp_path):
    spec = parse_config(write(tmp_path, minimal()))
    assert spec.evolve.cfl_alpha == 0.5
    assert spec.evolve.blowup_factor == 20.0
    assert spec.evolve.snapshot_every == 0
    assert spec.evolve.diag_every == 10
    assert spec.evolve.dealias is True
    assert spec.evolve.R is None
    assert spec.mode == "auto"
    assert spec.gamma is None
    assert spec.galilean is False


def test_comments_and_blank_lines_ignored(tmp_path):
    text = "\n\n# leading comment\n" + minimal() + "\n   \n# trailing\n"
    spec = parse_config(write(tmp_path, text))
    assert spec.grid.n == 512


def test_unknown_key_reports_line(tmp_path):
    text = minimal() + "bogus = 1\n"
    nline = text.count("\n")
    with pytest.raises(ConfigError, match=f"line {nline}.*bogus"):
        parse_config(write(tmp_path, text))


def test_duplicate_key_reports_both_lines(tmp_path):
    text = minimal() + "dt0 = 2e-3\n"
    with pytest.raises(ConfigError, match="duplicate key 'dt0'"):
        parse_config(write(tmp_path, text))


def test_missing_required_key(tmp_path):
    with pytest.raises(ConfigError, match="missing required key 'dt0'"):
        parse_config(write(tmp_path, minimal(dt0=None)))


def test_missing_equals_sign(tmp_path):
    with pytest.raises(ConfigError, match="line 1.*key = value"):
        parse_config(write(tmp_path, "kind radial1d\n" + minimal()))


def test_bad_number_reports_key(tmp_path):
    with pytest.raises(ConfigError, match="dt0 expects a number"):
        parse_config(write(tmp_path, minimal(dt0="fast")))
    with pytest.raises(ConfigError, match="n expects an integer"):
        parse_config(write(tmp_path, minimal(n="12.5")))


def test_bad_grid_rejected(tmp_path):
    with pytest.raises(ConfigError, match="power of two"):
        parse_config(write(tmp_path, minimal(kind="periodic3d", n="100")))
    with pytest.raises(ConfigError, match="kind must be"):
        parse_config(write(tmp_path, minimal(kind="cylindrical")))


def test_bad_evolve_values_rejected(tmp_path):
    with pytest.raises(ConfigError, match="cfl_alpha"):
        parse_config(write(tmp_path, minimal(cfl_alpha="2.0")))
    with pytest.raises(ConfigError, match="blowup_factor"):
        parse_config(write(tmp_path, minimal(blowup_factor="0.5")))


def test_bad_bool_and_mode(tmp_path):
    with pytest.raises(ConfigError, match="dealias expects on/off"):
        parse_config(write(tmp_path, minimal(dealias="maybe")))
    with pytest.raises(ConfigError, match="mode must be one of"):
        parse_config(write(tmp_path, minimal(mode="sideways")))


# ---------------------------------------------------------------------------
# init variants
# ---------------------------------------------------------------------------

def test_init_soliton_missing_param(tmp_path):
    with pytest.raises(ConfigError, match="missing parameter"):
        parse_config(write(tmp_path, minimal(init="soliton")))


def test_init_unknown_kind(tmp_path):
    with pytest.raises(ConfigError, match="unknown init kind"):
        parse_config(write(tmp_path, minimal(init="vortex m=1")))


def test_init_unexpected_parameter(tmp_path):
    with pytest.raises(ConfigError, match="unexpected init parameter"):
        parse_config(write(tmp_path, minimal(init="gaussian A=1.0 w=1.5 q=3")))


def test_init_file_path_relative_to_config(tmp_path):
    sub = tmp_path / "cfgs"
    sub.mkdir()
    spec = parse_config(write(sub, minimal(init="file ../snap.nlsf")))
    assert spec.init.kind == "file"
    assert spec.init.params["path"] == str(sub / ".." / "snap.nlsf")


def test_q_path_relative_to_config(tmp_path):
    spec = parse_config(write(tmp_path, minimal() + "q = ground.nlsq\n"))
    assert spec.q_path == str(tmp_path / "ground.nlsq")


# ---------------------------------------------------------------------------
# build_initial
# ---------------------------------------------------------------------------

def test_build_soliton(tmp_path, q):
    spec = parse_config(write(tmp_path, minimal(init="soliton a=0.9")))
    f = build_initial(spec, q)
    assert f.grid == spec.grid
    # first stored node is r = h, slightly below the r = 0 peak
    assert np.max(np.abs(f.values)) == pytest.approx(0.9 * q.shoot_value, rel=1e-2)


def test_build_gaussian(tmp_path, q):
    spec = parse_config(write(tmp_path, minimal(init="gaussian A=2.0 w=1.5")))
    f = build_initial(spec, q)
    r = spec.grid.radii()
    assert np.allclose(f.values, 2.0 * np.exp(-((r / 1.5) ** 2)))


def test_build_gaussian_bad_width(tmp_path, q):
    spec = parse_config(write(tmp_path, minimal(init="gaussian A=2.0 w=-1.0")))
    with pytest.raises(ConfigError, match="width"):
        build_initial(spec, q)


def test_build_from_snapshot(tmp_path, q):
    g = Grid(RADIAL1D, 512, 20.0)
    rng = np.random.default_rng(4)
    saved = Field(g, rng.standard_normal(512) + 1j * rng.standard_normal(512))
    write_nlsf(saved, tmp_path / "snap.nlsf")
    spec = parse_config(write(tmp_path, minimal(init="file snap.nlsf")))
    f = build_initial(spec, q)
    assert np.array_equal(f.values, saved.values)


def test_build_from_snapshot_grid_mismatch(tmp_path, q):
    g = Grid(RADIAL1D, 256, 20.0)  # config says n=512
    write_nlsf(Field(g, np.zeros(256, dtype=complex)), tmp_path / "snap.nlsf")
    spec = parse_config(write(tmp_path, minimal(init="file snap.nlsf")))
    with pytest.raises(ConfigError, match="does not match"):
        build_initial(spec, q)
