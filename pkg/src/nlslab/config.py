"""Line-oriented `key = value` run configuration.

Pinned keys: kind, n, L, dt0, t_end, cfl_alpha, blowup_factor,
snapshot_every, diag_every, dealias, and init, whose value is one of

    init = soliton a=1.2        scaled ground state a*Q
    init = gaussian A=4.0 w=1.5 A * exp(-|x|^2 / w^2)
    init = file snapshot.nlsf   NLSF field (path relative to the config)

Extra keys steer the pipeline and diagnostics: R (cutoff radius),
mode (finite-variance | local | radial | auto), gamma (localized-bound
margin), galilean (on/off), c2 (radial cutoff constant), q (NLSQ
profile to reuse instead of solving for the ground state).

Blank lines and lines starting with `#` are ignored; every parse error
reports its line number.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .evolution import EvolveConfig
from .field import Field
from .grid import PERIODIC3D, RADIAL1D, Grid

_PINNED = (
    "kind", "n", "L", "dt0", "t_end", "cfl_alpha", "blowup_factor",
    "snapshot_every", "diag_every", "dealias", "init",
)
_EXTRA = ("R", "mode", "gamma", "galilean", "c2", "q")
_MODES = ("finite-variance", "local", "radial", "auto")


@dataclass(frozen=True)
class InitSpec:
    kind: str                   # soliton | gaussian | file
    params: dict


@dataclass(frozen=True)
class RunSpec:
    grid: Grid
    evolve: EvolveConfig
    init: InitSpec
    mode: str = "auto"
    gamma: float | None = None
    galilean: bool = False
    c2: float | None = None
    q_path: str | None = None
    source: str = ""            # config path, echoed in provenance


def _fail(lineno: int, msg: str):
    raise ConfigError(f"line {lineno}: {msg}")


def _to_float(val: str, lineno: int, key: str) -> float:
    try:
        return float(val)
    except ValueError:
        _fail(lineno, f"{key} expects a number, got {val!r}")


def _to_int(val: str, lineno: int, key: str) -> int:
    try:
        return int(val)
    except ValueError:
        _fail(lineno, f"{key} expects an integer, got {val!r}")


def _to_bool(val: str, lineno: int, key: str) -> bool:
    low = val.lower()
    if low in ("on", "true", "1", "yes"):
        return True
    if low in ("off", "false", "0", "no"):
        return False
    _fail(lineno, f"{key} expects on/off, got {val!r}")


def _parse_init(val: str, lineno: int, base_dir: str) -> InitSpec:
    tokens = val.split()
    if not tokens:
        _fail(lineno, "init value is empty")
    head, rest = tokens[0], tokens[1:]
    if head == "file":
        if len(rest) != 1:
            _fail(lineno, "init = file expects exactly one path")
        return InitSpec("file", {"path": os.path.join(base_dir, rest[0])})
    wanted = {"soliton": ("a",), "gaussian": ("A", "w")}.get(head)
    if wanted is None:
        _fail(lineno, f"unknown init kind {head!r} (soliton | gaussian | file)")
    params = {}
    for token in rest:
        name, sep, num = token.partition("=")
        if not sep or name not in wanted:
            _fail(lineno, f"unexpected init parameter {token!r} (need {wanted})")
        params[name] = _to_float(num, lineno, name)
    missing = [w for w in wanted if w not in params]
    if missing:
        _fail(lineno, f"init = {head} missing parameter(s) {missing}")
    return InitSpec(head, params)


def parse_config(path) -> RunSpec:
    path = os.fspath(path)
    base_dir = os.path.dirname(os.path.abspath(path))
    seen = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            if not sep:
                _fail(lineno, f"expected 'key = value', got {line!r}")
            key = key.strip()
            val = val.strip()
            if key not in _PINNED and key not in _EXTRA:
                _fail(lineno, f"unknown key {key!r}")
            if key in seen:
                _fail(lineno, f"duplicate key {key!r} (first on line {seen[key][0]})")
            seen[key] = (lineno, val)

    def need(key):
        if key not in seen:
            raise ConfigError(f"missing required key {key!r}")
        return seen[key]

    lineno, kind = need("kind")
    if kind not in (PERIODIC3D, RADIAL1D):
        _fail(lineno, f"kind must be {PERIODIC3D} or {RADIAL1D}, got {kind!r}")
    lineno, nval = need("n")
    n = _to_int(nval, lineno, "n")
    lineno, lval = need("L")
    half_width = _to_float(lval, lineno, "L")
    try:
        grid = Grid(kind, n, half_width)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    def opt_float(key, default):
        if key not in seen:
            return default
        lineno, val = seen[key]
        return _to_float(val, lineno, key)

    def opt_int(key, default):
        if key not in seen:
            return default
        lineno, val = seen[key]
        return _to_int(val, lineno, key)

    dealias = True
    if "dealias" in seen:
        lineno, val = seen["dealias"]
        dealias = _to_bool(val, lineno, "dealias")

    lineno, dt0 = need("dt0")
    lineno_t, t_end = need("t_end")
    try:
        evolve = EvolveConfig(
            dt0=_to_float(dt0, lineno, "dt0"),
            t_end=_to_float(t_end, lineno_t, "t_end"),
            cfl_alpha=opt_float("cfl_alpha", 0.5),
            blowup_factor=opt_float("blowup_factor", 20.0),
            snapshot_every=opt_int("snapshot_every", 0),
            diag_every=opt_int("diag_every", 10),
            dealias=dealias,
            R=opt_float("R", None),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    lineno, init_val = need("init")
    init = _parse_init(init_val, lineno, base_dir)

    mode = "auto"
    if "mode" in seen:
        lineno, mode = seen["mode"]
        if mode not in _MODES:
            _fail(lineno, f"mode must be one of {_MODES}, got {mode!r}")
    galilean = False
    if "galilean" in seen:
        galilean = _to_bool(seen["galilean"][1], seen["galilean"][0], "galilean")
    q_path = None
    if "q" in seen:
        q_path = os.path.join(base_dir, seen["q"][1])

    return RunSpec(
        grid=grid, evolve=evolve, init=init,
        mode=mode,
        gamma=opt_float("gamma", None),
        galilean=galilean,
        c2=opt_float("c2", None),
        q_path=q_path, source=path,
    )


def build_initial(spec: RunSpec, q) -> Field:
    """Materialize the initial field described by a RunSpec."""
    init = spec.init
    grid = spec.grid
    if init.kind == "soliton":
        a = init.params["a"]
        if grid.kind == RADIAL1D:
            vals = a * q.evaluate(grid.radii())
        else:
            vals = a * q.evaluate(grid.radius_mesh())
        return Field(grid, vals.astype(np.complex128))
    if init.kind == "gaussian":
        amp, w = init.params["A"], init.params["w"]
        if w <= 0:
            raise ConfigError("gaussian width w must be positive")
        rr = grid.radii() if grid.kind == RADIAL1D else grid.radius_mesh()
        return Field(grid, (amp * np.exp(-(rr / w) ** 2)).astype(np.complex128))
    from .formats import read_nlsf

    f = read_nlsf(init.params["path"])
    if f.grid != grid:
        raise ConfigError(
            f"snapshot grid {f.grid.kind} n={f.grid.n} L={f.grid.half_width} "
            f"does not match the configured grid"
        )
    return f
