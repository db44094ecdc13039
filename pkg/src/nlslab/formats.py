"""File codecs: NLSF field snapshots, NLSQ profile exports, CSV series.

NLSF is a little-endian binary: magic `NLSF`, version u32 = 1, kind u8
(0 = periodic3d, 1 = radial1d), n u32, half-width f64, time f64, then
the samples as interleaved (re, im) f64 pairs with x fastest. NLSQ is
a text profile: three `#` header lines, then `r value` pairs starting
at r = 0, 17 significant digits. CSV carries the diagnostic series
under the fixed column header, same 17-digit decimals, so identical
runs produce bitwise-identical files.
"""

from __future__ import annotations

import math
import struct

import numpy as np

from .errors import FormatError
from .field import Field, radial_derivative
from .grid import PERIODIC3D, RADIAL1D, Grid
from .groundstate import TAIL_SWITCH, GroundState
from .series import COLUMNS, DiagnosticSeries

_NLSF_MAGIC = b"NLSF"
_NLSF_VERSION = 1
_NLSF_HEADER = struct.Struct("<4sIBIdd")
_KIND_CODE = {PERIODIC3D: 0, RADIAL1D: 1}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}


def _fmt(x: float) -> str:
    return "%.17g" % x


# ---------------------------------------------------------------------------
# NLSF field snapshots
# ---------------------------------------------------------------------------

def write_nlsf(f: Field, path) -> None:
    header = _NLSF_HEADER.pack(
        _NLSF_MAGIC, _NLSF_VERSION, _KIND_CODE[f.grid.kind],
        f.grid.n, f.grid.half_width, f.t,
    )
    if f.grid.kind == PERIODIC3D:
        flat = np.ravel(f.values, order="F")  # x fastest on disk
    else:
        flat = f.values
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(flat.astype("<c16").tobytes())


def read_nlsf(path) -> Field:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _NLSF_HEADER.size:
        raise FormatError(
            f"truncated header: need {_NLSF_HEADER.size} bytes, file has {len(raw)}"
        )
    magic, version, kind_code, n, half_width, t = _NLSF_HEADER.unpack_from(raw)
    if magic != _NLSF_MAGIC:
        raise FormatError(f"bad magic {magic!r} (expected {_NLSF_MAGIC!r})")
    if version != _NLSF_VERSION:
        raise FormatError(f"unsupported version {version} (expected {_NLSF_VERSION})")
    if kind_code not in _CODE_KIND:
        raise FormatError(f"unknown grid-kind code {kind_code}")
    kind = _CODE_KIND[kind_code]
    try:
        grid = Grid(kind, int(n), float(half_width))
    except ValueError as exc:
        raise FormatError(f"invalid grid in header: {exc}") from exc
    count = n**3 if kind == PERIODIC3D else n
    need = count * 16
    have = len(raw) - _NLSF_HEADER.size
    if have != need:
        raise FormatError(
            f"truncated payload at byte {_NLSF_HEADER.size}: "
            f"expected {need} sample bytes, found {have}"
        )
    flat = np.frombuffer(raw, dtype="<c16", count=count, offset=_NLSF_HEADER.size)
    flat = flat.astype(np.complex128)
    if kind == PERIODIC3D:
        values = flat.reshape((n, n, n), order="F")
    else:
        values = flat
    return Field(grid, values, float(t))


# ---------------------------------------------------------------------------
# NLSQ ground-state profiles
# ---------------------------------------------------------------------------

def write_nlsq(q: GroundState, path) -> None:
    lines = [
        "# nlsq v1",
        f"# rmax={_fmt(q.r_max)} n={q.n} tol={_fmt(q.tol)}",
        f"# mass_sq={_fmt(q.mass_sq)} grad_sq={_fmt(q.grad_sq)} l4_4={_fmt(q.l4_4)}",
        f"0 {_fmt(q.shoot_value)}",
    ]
    lines.extend(
        f"{_fmt(r)} {_fmt(v)}" for r, v in zip(q.r_grid, q.profile)
    )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _header_floats(line: str, lineno: int, keys) -> list:
    parts = line.lstrip("# ").split()
    if len(parts) != len(keys):
        raise FormatError(f"line {lineno}: expected fields {keys}, got {line!r}")
    out = []
    for part, key in zip(parts, keys):
        if not part.startswith(key + "="):
            raise FormatError(f"line {lineno}: expected '{key}=...', got {part!r}")
        try:
            out.append(float(part[len(key) + 1:]))
        except ValueError as exc:
            raise FormatError(f"line {lineno}: bad number in {part!r}") from exc
    return out


def read_nlsq(path) -> GroundState:
    """Rebuild a usable ground state from an NLSQ export.

    The derivative samples are not stored; inside the spline region they
    are recovered by second-order finite differences, and beyond the
    tail splice by the analytic e^{-r}/r derivative, which reproduces
    the original evaluate() exactly.
    """
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) < 5 or lines[0] != "# nlsq v1":
        raise FormatError("not an NLSQ v1 file")
    rmax, n_float, tol = _header_floats(lines[1], 2, ("rmax", "n", "tol"))
    mass_sq, grad_sq, l4_4 = _header_floats(
        lines[2], 3, ("mass_sq", "grad_sq", "l4_4")
    )
    n = int(n_float)
    try:
        pairs = np.array([[float(a) for a in ln.split()] for ln in lines[3:]])
    except ValueError as exc:
        raise FormatError(f"bad profile pair: {exc}") from exc
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise FormatError("profile lines must be 'r value' pairs")
    if pairs.shape[0] != n + 1 or pairs[0, 0] != 0.0:
        raise FormatError(
            f"expected {n + 1} pairs starting at r=0, found {pairs.shape[0]}"
        )
    shoot_value = float(pairs[0, 1])
    r = np.ascontiguousarray(pairs[1:, 0])
    qs = np.ascontiguousarray(pairs[1:, 1])
    if abs(r[-1] - rmax) > 1e-12 * rmax:
        raise FormatError(f"last radius {r[-1]} disagrees with header rmax={rmax}")

    ps = radial_derivative(qs, float(r[0]))
    below = np.nonzero(qs < TAIL_SWITCH * shoot_value)[0]
    if below.size == 0:
        raise FormatError("profile never decays below the tail threshold")
    im = int(below[0])
    tail_c = float(qs[im] * r[im] * math.exp(r[im]))
    tail = r > r[im]
    ps[tail] = -tail_c * np.exp(-r[tail]) * (1.0 / r[tail] + 1.0 / r[tail] ** 2)

    for arr in (r, qs, ps):
        arr.setflags(write=False)
    return GroundState(
        r_grid=r, profile=qs, dprofile=ps,
        mass_sq=mass_sq, grad_sq=grad_sq, l4_4=l4_4,
        energy=0.5 * grad_sq - 0.25 * l4_4,
        c_gn=4.0 / (3.0 * math.sqrt(mass_sq * grad_sq)),
        shoot_value=shoot_value, tol=tol,
        tail_c=tail_c, r_match=float(r[im]),
    )


# ---------------------------------------------------------------------------
# Diagnostic-series CSV
# ---------------------------------------------------------------------------

def write_csv(series: DiagnosticSeries, path) -> None:
    lines = [",".join(COLUMNS)]
    for row in series.rows:
        lines.append(",".join(_fmt(row[c]) for c in COLUMNS))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> DiagnosticSeries:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != ",".join(COLUMNS):
        raise FormatError(
            f"CSV header mismatch: expected {','.join(COLUMNS)!r}"
        )
    series = DiagnosticSeries()
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != len(COLUMNS):
            raise FormatError(
                f"line {lineno}: expected {len(COLUMNS)} fields, got {len(parts)}"
            )
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise FormatError(f"line {lineno}: bad number ({exc})") from exc
        series.append(**dict(zip(COLUMNS, vals)))
    return series
