"""Command-line front door and the classify-evolve-bound pipeline.

Every subcommand prints a machine-readable record; the pipeline renders
a verdict and encodes it in the exit status: 0 for bound_respected,
no_blowup_within_horizon, or bound_not_applicable, 2 for bound_violated
(which the underlying theory forbids, so it flags an implementation or
discretization bug), 1 for any error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy

from . import __version__, kernels
from .config import RunSpec, build_initial, parse_config
from .errors import (
    BoundaryExcludedError,
    NlslabError,
    NotApplicableError,
    UntrustedVarianceError,
)
from .field import compute_invariants
from .formats import read_nlsf, read_nlsq, write_csv, write_nlsf, write_nlsq
from .grid import RADIAL1D
from .groundstate import solve_ground_state
from .modulation import fit_modulation, rescale_to_unit_mass
from .thresholds import CASE_BLOWUP, Classification, classify, galilean_reduce, solve_lambda
from .virial import (
    C2_DEFAULT,
    C_R_DEFAULT,
    GAMMA0_DEFAULT,
    Cutoff,
    bound_finite_variance,
    bound_localized,
    bound_radial,
    eta_geq_R,
    radial_bound_radius,
    variance_and_rate,
    z_R_and_second_derivative,
)
from .evolution import evolve

VERDICT_RESPECTED = "bound_respected"
VERDICT_NO_BLOWUP = "no_blowup_within_horizon"
VERDICT_NOT_APPLICABLE = "bound_not_applicable"
VERDICT_VIOLATED = "bound_violated"

_Q_DEFAULTS = {"r_max": 20.0, "n": 8192, "tol": 1e-12}


def _num(x) -> str:
    if x is None:
        return "absent"
    return "%.12g" % x


def _load_q(q_path):
    if q_path:
        return read_nlsq(q_path)
    return solve_ground_state(**_Q_DEFAULTS)


def _classification_line(c: Classification) -> str:
    return (
        f"me_ratio={_num(c.me_ratio)} lambda_minus={_num(c.lambda_minus)} "
        f"lambda={_num(c.lam)} eta0={_num(c.eta0)} case={c.case}"
    )


def _bound_line(b) -> str:
    return (
        f"t_b={_num(b.t_b)} lambda={_num(b.lam)} mode={b.mode} "
        f"r0={_num(b.r0)} rprime0={_num(b.rprime0)}"
    )


# ---------------------------------------------------------------------------
# bound computation shared by `bound` and `pipeline`
# ---------------------------------------------------------------------------

def _compute_bound(mode, f, q, rep, R=None, gamma=None, c2=None):
    """One blow-up-time bound of the requested mode for the field f."""
    if mode == "finite-variance":
        var0, rprime_raw = variance_and_rate(f)
        return bound_finite_variance(rep, var0, rprime_raw, q)
    me = rep.mass * rep.energy / (q.mass_sq * q.energy)
    _, lam = solve_lambda(me)
    if mode == "local":
        if gamma is None:
            gamma = 0.5 * min(lam - 1.0, GAMMA0_DEFAULT)
        if R is None:
            R = C_R_DEFAULT / math.sqrt(gamma)
        lv = z_R_and_second_derivative(f, Cutoff(R))
        return bound_localized(rep, lv.z_R, lv.z_prime, lam, gamma, R, q)
    if mode == "radial":
        if c2 is None:
            c2 = C2_DEFAULT
        R = radial_bound_radius(lam, c2)
        lv = z_R_and_second_derivative(f, Cutoff(R))
        return bound_radial(rep, lv.z_R, lv.z_prime, lam, q, f.grid.kind, c2)
    raise NlslabError(f"unknown bound mode {mode!r}")


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

@dataclass
class PipelineVerdict:
    classification: Classification | None
    excluded_reason: str | None
    bounds: dict                      # mode -> BlowupBound
    bounds_skipped: dict              # mode -> reason
    outcome: str
    t_obs: float | None
    verdict: str
    provenance: dict = dc_field(default_factory=dict)


def run_pipeline(config_path, out_dir=None) -> PipelineVerdict:
    """Classify, evolve, bound, and render the verdict for one config.

    Above-threshold data is rescaled to unit mass (the frame the
    blow-up-time bounds are stated in) before bounding and evolving, so
    t_obs and t_b share one clock. Other cases evolve the data as given;
    the classification bands are scale-invariant either way.
    """
    spec = parse_config(config_path)
    q = _load_q(spec.q_path)
    f0 = build_initial(spec, q)

    classification = None
    excluded = None
    try:
        classification = classify(f0, q, apply_galilean=spec.galilean)
    except BoundaryExcludedError as exc:
        excluded = str(exc)

    f_run = galilean_reduce(f0)[0] if spec.galilean else f0

    bounds = {}
    skipped = {}
    if classification is not None and classification.case == CASE_BLOWUP:
        try:
            f_run = rescale_to_unit_mass(f_run, q)
        except NlslabError as exc:
            skipped["rescale"] = str(exc)
        modes = ["finite-variance", "local"]
        if spec.grid.kind == RADIAL1D:
            modes.append("radial")
        if spec.mode != "auto":
            modes = [spec.mode]
        for mode in modes:
            try:
                bounds[mode] = _compute_bound(
                    mode, f_run, q, compute_invariants(f_run, q),
                    R=spec.R if spec.mode != "auto" else None,
                    gamma=spec.gamma, c2=spec.c2,
                )
            except (NotApplicableError, UntrustedVarianceError, NlslabError) as exc:
                skipped[mode] = str(exc)

    run = evolve(f_run, spec.evolve, q)

    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        write_csv(run.diagnostics, os.path.join(out_dir, "diag.csv"))
        write_nlsf(f0, os.path.join(out_dir, "init.nlsf"))
        if run.final is not None:
            write_nlsf(run.final, os.path.join(out_dir, "final.nlsf"))
        for i, snap in enumerate(run.snapshots):
            write_nlsf(snap, os.path.join(out_dir, f"snap_{i:04d}.nlsf"))
        write_nlsq(q, os.path.join(out_dir, "q.nlsq"))

    t_obs = run.t_blowup_observed
    if classification is None:
        verdict = VERDICT_NOT_APPLICABLE
    elif t_obs is not None and bounds:
        ok = all(t_obs <= b.t_b for b in bounds.values())
        verdict = VERDICT_RESPECTED if ok else VERDICT_VIOLATED
    elif t_obs is not None:
        verdict = VERDICT_NOT_APPLICABLE
    else:
        verdict = VERDICT_NO_BLOWUP

    return PipelineVerdict(
        classification=classification,
        excluded_reason=excluded,
        bounds=bounds,
        bounds_skipped=skipped,
        outcome=run.outcome,
        t_obs=t_obs,
        verdict=verdict,
        provenance={
            "config": os.fspath(config_path),
            "nlslab": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "kernels": kernels.BACKEND,
            "grid": f"{spec.grid.kind} n={spec.grid.n} L={_num(spec.grid.half_width)}",
        },
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_groundstate(args) -> int:
    q = solve_ground_state(args.rmax, args.n, args.tol)
    if args.out:
        write_nlsq(q, args.out)
    print(
        f"Q0={_num(q.shoot_value)} mass_sq={_num(q.mass_sq)} "
        f"grad_sq={_num(q.grad_sq)} l4_4={_num(q.l4_4)} "
        f"energy={_num(q.energy)} c_gn={_num(q.c_gn)} iterations={q.iterations}"
    )
    return 0


def cmd_classify(args) -> int:
    f = read_nlsf(args.input)
    q = _load_q(args.q)
    c = classify(f, q, apply_galilean=args.galilean)
    print(_classification_line(c))
    if c.note:
        print(f"note: {c.note}", file=sys.stderr)
    return 0


def cmd_evolve(args) -> int:
    spec = parse_config(args.config)
    q = _load_q(spec.q_path)
    f0 = build_initial(spec, q)
    run = evolve(f0, spec.evolve, q)
    write_csv(run.diagnostics, args.out_diag)
    if args.out_snap:
        os.makedirs(args.out_snap, exist_ok=True)
        for i, snap in enumerate(run.snapshots):
            write_nlsf(snap, os.path.join(args.out_snap, f"snap_{i:04d}.nlsf"))
        if run.final is not None:
            write_nlsf(run.final, os.path.join(args.out_snap, "final.nlsf"))
    print(
        f"outcome={run.outcome} t_final={_num(run.t_final)} "
        f"t_obs={_num(run.t_blowup_observed)} max_grad={_num(run.max_grad)}"
    )
    return 0


def cmd_virial(args) -> int:
    f = read_nlsf(args.input)
    q = _load_q(args.q)
    R = args.R if args.R is not None else 0.5 * f.grid.half_width
    lv = z_R_and_second_derivative(f, Cutoff(R))
    print(
        f"R={_num(lv.R)} z_R={_num(lv.z_R)} z_prime={_num(lv.z_prime)} "
        f"z_second={_num(lv.z_second)} virial_rhs={_num(lv.virial_rhs)} "
        f"A_R={_num(lv.A_R)} A_R_bound={_num(lv.A_R_bound)}"
    )
    try:
        var, rate = variance_and_rate(f)
        print(f"variance={_num(var)} rprime={_num(rate)}")
    except UntrustedVarianceError as exc:
        print(f"variance=untrusted ({exc})")
    print(f"eta_geq_R={_num(eta_geq_R(f, q, R))}")
    return 0


def cmd_bound(args) -> int:
    f = read_nlsf(args.input)
    q = _load_q(args.q)
    beta = compute_invariants(f, q).mass / q.mass_sq
    if abs(beta - 1.0) > 1e-9:
        f = rescale_to_unit_mass(f, q)
    rep = compute_invariants(f, q)
    b = _compute_bound(args.mode, f, q, rep, R=args.R, gamma=args.gamma, c2=args.c2)
    print(_bound_line(b))
    if abs(beta - 1.0) > 1e-9:
        print(
            f"# unit-mass frame: beta={_num(beta)}; multiply t_b by beta^2 "
            "for the input field's clock"
        )
    return 0


def cmd_modulate(args) -> int:
    f = read_nlsf(args.input)
    q = _load_q(args.q)
    fit = fit_modulation(f, q, args.lam)
    x0 = ",".join(_num(c) for c in fit.x0)
    print(
        f"theta={_num(fit.theta)} x0=({x0}) beta={_num(fit.beta)} "
        f"resid_l2={_num(fit.resid_l2)} resid_h1={_num(fit.resid_h1dot)}"
    )
    if not fit.converged:
        print("note: coordinate descent hit the sweep cap", file=sys.stderr)
    return 0


def cmd_pipeline(args) -> int:
    v = run_pipeline(args.config, out_dir=args.out_dir)
    if v.classification is not None:
        print(_classification_line(v.classification))
    else:
        print(f"classification_excluded: {v.excluded_reason}")
    for b in v.bounds.values():
        print(_bound_line(b))
    for mode, reason in v.bounds_skipped.items():
        print(f"bound_skipped: mode={mode} reason={reason}", file=sys.stderr)
    print(f"outcome={v.outcome} t_obs={_num(v.t_obs)}")
    print(f"verdict={v.verdict}")
    return 2 if v.verdict == VERDICT_VIOLATED else 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nlslab",
        description="Numerical laboratory for the 3D focusing cubic Schrodinger equation",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("groundstate", help="solve and certify the ground-state profile")
    g.add_argument("--rmax", type=float, default=_Q_DEFAULTS["r_max"])
    g.add_argument("--n", type=int, default=_Q_DEFAULTS["n"])
    g.add_argument("--tol", type=float, default=_Q_DEFAULTS["tol"])
    g.add_argument("--out", help="write the profile as NLSQ")
    g.set_defaults(func=cmd_groundstate)

    c = sub.add_parser("classify", help="place initial data on the mass-energy plane")
    c.add_argument("--input", required=True, help="NLSF field snapshot")
    c.add_argument("--q", help="NLSQ profile (default: solve on demand)")
    c.add_argument("--galilean", action="store_true", help="boost to zero momentum first")
    c.set_defaults(func=cmd_classify)

    e = sub.add_parser("evolve", help="run the split-step integrator from a config")
    e.add_argument("--config", required=True)
    e.add_argument("--out-diag", required=True, help="diagnostic CSV path")
    e.add_argument("--out-snap", help="directory for NLSF snapshots")
    e.set_defaults(func=cmd_evolve)

    vi = sub.add_parser("virial", help="localized virial quantities of a snapshot")
    vi.add_argument("--input", required=True)
    vi.add_argument("--q", help="NLSQ profile")
    vi.add_argument("--R", type=float, help="cutoff radius (default L/2)")
    vi.set_defaults(func=cmd_virial)

    b = sub.add_parser("bound", help="blow-up-time upper bound at t=0")
    b.add_argument("--input", required=True)
    b.add_argument("--q", help="NLSQ profile")
    b.add_argument("--mode", required=True, choices=("finite-variance", "local", "radial"))
    b.add_argument("--R", type=float, help="cutoff radius for the local mode")
    b.add_argument("--gamma", type=float, help="margin for the local mode")
    b.add_argument("--c2", type=float, help="radius constant for the radial mode")
    b.set_defaults(func=cmd_bound)

    m = sub.add_parser("modulate", help="fit soliton modulation parameters")
    m.add_argument("--input", required=True)
    m.add_argument("--q", help="NLSQ profile")
    m.add_argument("--lambda", dest="lam", type=float, required=True)
    m.set_defaults(func=cmd_modulate)

    pl = sub.add_parser("pipeline", help="classify, evolve, bound, verdict")
    pl.add_argument("--config", required=True)
    pl.add_argument("--out-dir", help="artifact directory (CSV + NLSF)")
    pl.set_defaults(func=cmd_pipeline)

    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NlslabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
