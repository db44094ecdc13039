#!/usr/bin/env python3
"""Figure rendering for diagnostic CSV files.

Standalone on purpose: this side of the fence talks to the solver only
through the diagnostic CSV contract (the pinned column header below),
so it can plot archived runs without the solver installed. The few
constants it needs beyond that (the ground-state mass and the
dichotomy cubic) are restated here instead of imported.

Kinds:
    me_plane          trajectories on the (eta^2, me) plane with the
                      admissible-region geometry
    eta_timeseries    eta(t) with the lambda_-, 1, lambda guides
    virial_timeseries variance, truncated variance z_R, and
                      24 E - 4 ||grad u||^2 against time

Usage:
    python3 plots/render.py --kind me_plane --csv diag.csv --out fig.png
"""

import argparse
import math
import sys

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

# Pinned CSV header written by the solver's diagnostic loop.
COLUMNS = (
    "t", "mass", "energy", "grad_sq", "l4_4", "eta",
    "variance", "rprime", "z_R", "eta_geq_R", "A_R_bound",
)

# ||Q||_2^2 of the 3D cubic ground state. M[Q] E[Q] = M_Q^2 / 2 by the
# Pohozhaev identities, so this one number normalizes the me axis.
M_Q = 18.8972512326797
ME_Q = 0.5 * M_Q * M_Q

FIGSIZE = (7.0, 5.0)
DPI = 120

KINDS = ("me_plane", "eta_timeseries", "virial_timeseries")


class RenderError(Exception):
    pass


# ---------------------------------------------------------------------------
# CSV input
# ---------------------------------------------------------------------------

def load_diag(path):
    """Read one diagnostic CSV into a dict of float arrays, keyed by column."""
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise RenderError(f"{path}: {exc}") from exc
    if not lines or lines[0] != ",".join(COLUMNS):
        raise RenderError(f"{path}: header mismatch, expected {','.join(COLUMNS)!r}")
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != len(COLUMNS):
            raise RenderError(
                f"{path}: line {lineno}: expected {len(COLUMNS)} fields, got {len(parts)}"
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise RenderError(f"{path}: line {lineno}: bad number ({exc})") from exc
    if not rows:
        raise RenderError(f"{path}: no data rows")
    arr = np.array(rows)
    return {name: arr[:, i] for i, name in enumerate(COLUMNS)}


def me_of(diag):
    """Mass-energy ratio from the mass and energy columns."""
    return diag["mass"] * diag["energy"] / ME_Q


# ---------------------------------------------------------------------------
# dichotomy cubic (local copy; the solver is deliberately not imported)
# ---------------------------------------------------------------------------

def _cubic(x):
    return 3.0 * x * x - 2.0 * x**3


def _bisect(lo, hi, me, tol=1e-12):
    flo = _cubic(lo) - me
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = _cubic(mid) - me
        if fmid == 0.0 or hi - lo < tol:
            return mid
        if flo * fmid <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def dichotomy_roots(me):
    """(lambda_minus, lambda) of 3 x^2 - 2 x^3 = me; lambda_minus is None
    for me < 0 and both are None at or past the threshold line me >= 1."""
    if me >= 1.0 - 1e-12:
        return None, None
    if me < 0.0:
        return None, _bisect(1.5, 4.0, me)
    return _bisect(0.0, 1.0, me), _bisect(1.0, 1.5, me)


# ---------------------------------------------------------------------------
# figure kinds
# ---------------------------------------------------------------------------

def me_plane_curves(xmax, npts=400):
    """(x, upper, lower) with x = eta^2: data obeys me <= 3x (kinetic
    dominance) and me >= 3x - 2x^{3/2} (sharp interpolation), the lower
    curve touching the me = 1 line tangentially at x = 1."""
    x = np.linspace(0.0, xmax, npts)
    return x, 3.0 * x, 3.0 * x - 2.0 * x**1.5


def render_me_plane(ax, diags, labels):
    xmax = 2.5
    for d in diags:
        xmax = max(xmax, 1.1 * float(np.max(d["eta"] ** 2)))
    x, upper, lower = me_plane_curves(xmax)
    ylo = min(-0.5, float(np.floor(np.min(lower))))
    yhi = 1.4

    ax.fill_between(x, upper, yhi, color="0.88", zorder=0)
    ax.fill_between(x, ylo, lower, color="0.88", zorder=0)
    ax.plot(x, upper, color="0.35", lw=1.2)
    ax.plot(x, lower, color="0.35", lw=1.2)
    ax.axhline(1.0, color="0.6", lw=0.8, ls=":")
    ax.plot([1.0], [1.0], marker="o", ms=4, color="0.2", zorder=4)

    for d, label in zip(diags, labels):
        xs = d["eta"] ** 2
        ys = me_of(d)
        ax.plot(xs, ys, lw=1.6, label=label, zorder=3)
        ax.plot(xs[:1], ys[:1], marker="o", ms=5, zorder=3,
                color=ax.lines[-1].get_color())

    ax.set_xlim(0.0, xmax)
    ax.set_ylim(ylo, yhi)
    ax.set_xlabel(r"$\eta^2$")
    ax.set_ylabel(r"$ME / (M_Q E_Q)$")
    ax.set_title("mass-energy plane (shaded: excluded)")
    ax.legend(loc="lower right", fontsize=8)


def render_eta_timeseries(ax, diags, labels):
    for d, label in zip(diags, labels):
        ax.plot(d["t"], d["eta"], lw=1.6, label=label)
        color = ax.lines[-1].get_color()
        lam_minus, lam = dichotomy_roots(float(me_of(d)[0]))
        for guide, style in ((lam_minus, ":"), (lam, "--")):
            if guide is not None:
                ax.axhline(guide, color=color, lw=0.9, ls=style, alpha=0.7)
    ax.axhline(1.0, color="0.5", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\eta(t)$")
    ax.set_title(r"closeness ratio with $\lambda_-$ (dotted) and $\lambda$ (dashed)")
    ax.legend(loc="best", fontsize=8)


def render_virial_timeseries(ax, diags, labels):
    for d, label in zip(diags, labels):
        suffix = f" [{label}]" if len(diags) > 1 else ""
        ax.plot(d["t"], d["variance"], lw=1.6, label="variance" + suffix)
        ax.plot(d["t"], d["z_R"], lw=1.6, ls="--", label=r"$z_R$" + suffix)
        ax.plot(d["t"], 24.0 * d["energy"] - 4.0 * d["grad_sq"], lw=1.2,
                ls=":", label=r"$24E - 4\|\nabla u\|^2$" + suffix)
    ax.axhline(0.0, color="0.5", lw=0.8)
    ax.set_xlabel("t")
    ax.set_title("variance diagnostics")
    ax.legend(loc="best", fontsize=8)


_RENDERERS = {
    "me_plane": render_me_plane,
    "eta_timeseries": render_eta_timeseries,
    "virial_timeseries": render_virial_timeseries,
}


def render(kind, csv_paths, out_path):
    """Load the CSVs, draw one figure of the requested kind, save PNG."""
    if kind not in _RENDERERS:
        raise RenderError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    diags = [load_diag(p) for p in csv_paths]
    labels = [str(p) for p in csv_paths]
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    try:
        _RENDERERS[kind](ax, diags, labels)
        fig.savefig(out_path, dpi=DPI, metadata={"Software": None})
    finally:
        plt.close(fig)


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="render.py", description="Render diagnostic CSV files to figures."
    )
    ap.add_argument("--kind", required=True, choices=KINDS)
    ap.add_argument("--csv", required=True, nargs="+",
                    help="one or more diagnostic CSV files (overlaid in order)")
    ap.add_argument("--out", required=True, help="output image path (.png)")
    args = ap.parse_args(argv)
    try:
        render(args.kind, args.csv, args.out)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
