"""Ground state of -Q + Lap Q + Q^3 = 0 by radial shooting.

The radial profile solves

    Q'' + (2/r) Q' - Q + Q^3 = 0,   Q'(0) = 0,   Q(r) -> 0,

and the decaying solution exists for exactly one amplitude Q(0); values
above it make the profile cross zero, values below make it turn around
and grow (the linear -Q term feeds an e^{+r} mode). We bisect Q(0) on
that dichotomy with a classical RK4 march, then splice the analytic
far-field c e^{-r}/r (the decaying solution of the linearized radial
equation) beyond the point where the nonlinearity is negligible; the
splice also removes the e^{+r} contamination that any finite-precision
shoot accumulates.

Certification checks the exact integral identities

    ||grad Q||_2^2 = 3 ||Q||_2^2,   ||Q||_4^4 = 4 ||Q||_2^2,
    E[Q] = ||grad Q||_2^2 / 6,

which follow from multiplying the equation by Q and by r Q' and
integrating by parts; their residuals bound every discretization error
that matters downstream, since all thresholds are ratios against these
norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import CertificationError, DomainTooSmallError, ModeError, SolverFailureError
from .grid import RADIAL1D, Grid
from .field import Field

# Bisection bracket for Q(0); the decaying amplitude for this equation
# lies well inside. If either endpoint misclassifies we error out with
# diagnostics rather than widen silently.
BRACKET_LO = 1.0
BRACKET_HI = 10.0

# Fraction of Q(0) below which the cubic term is treated as negligible
# and the profile switches to the analytic tail.
TAIL_SWITCH = 1e-5


@dataclass(frozen=True, eq=False)  # eq=False: identity hash, arrays inside
class GroundState:
    """Shooting output plus certified norms; immutable."""

    r_grid: np.ndarray      # radii (0, r_max], uniform
    profile: np.ndarray     # Q(r_j) > 0, strictly decreasing
    dprofile: np.ndarray    # Q'(r_j)
    mass_sq: float          # ||Q||_2^2
    grad_sq: float          # ||grad Q||_2^2
    l4_4: float             # ||Q||_4^4
    energy: float           # E[Q]
    c_gn: float             # 4 / (3 ||Q||_2 ||grad Q||_2)
    shoot_value: float      # Q(0)
    tol: float              # bisection tolerance on Q(0)
    tail_c: float           # coefficient of the spliced c e^{-r}/r tail
    r_match: float          # radius where the splice starts
    iterations: int = 0     # bisection steps taken

    @property
    def r_max(self) -> float:
        return float(self.r_grid[-1])

    @property
    def n(self) -> int:
        return self.r_grid.size

    def evaluate(self, r):
        """Q at arbitrary radii: cubic spline inside, analytic tail outside.

        Valid for any r >= 0 (the tail extends past r_max), which is what
        lets a 3D box sample the profile out to its corners.
        """
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        out = np.empty(r.shape, dtype=float)
        inside = r <= self.r_match
        out[inside] = _spline(self)(r[inside])
        ro = r[~inside]
        out[~inside] = self.tail_c * np.exp(-ro) / ro
        return float(out[0]) if scalar else out


@lru_cache(maxsize=8)
def _spline(q: GroundState) -> CubicSpline:
    # Prepend the r=0 node; clamp the derivative to 0 there (even
    # profile) and to the stored Q' at the outer end.
    stop = int(np.searchsorted(q.r_grid, q.r_match, side="right"))
    x = np.concatenate(([0.0], q.r_grid[:stop]))
    y = np.concatenate(([q.shoot_value], q.profile[:stop]))
    return CubicSpline(x, y, bc_type=((1, 0.0), (1, float(q.dprofile[stop - 1]))))


def _march(a: float, h: float, n: int, classify_only: bool):
    """RK4 march of (Q, Q') from the series start at r = h.

    classify_only: abort early and return 'cross' / 'under' / 'end'.
    Otherwise integrate all the way and return the sample arrays.
    """
    # Series start from Q(r) ~ a + (a - a^3) r^2 / 6, which absorbs the
    # removable (2/r) Q' singularity at the origin.
    qv = a + (a - a * a * a) * h * h / 6.0
    pv = (a - a * a * a) * h / 3.0
    if not classify_only:
        qs = np.empty(n)
        ps = np.empty(n)
        qs[0] = qv
        ps[0] = pv
    grow_cap = a + 0.5
    for j in range(n - 1):
        r = (j + 1) * h
        # RK4 on Q' = P, P' = Q - Q^3 - (2/r) P
        k1q = pv
        k1p = qv - qv**3 - 2.0 * pv / r
        r2 = r + 0.5 * h
        q2 = qv + 0.5 * h * k1q
        p2 = pv + 0.5 * h * k1p
        k2q = p2
        k2p = q2 - q2**3 - 2.0 * p2 / r2
        q3 = qv + 0.5 * h * k2q
        p3 = pv + 0.5 * h * k2p
        k3q = p3
        k3p = q3 - q3**3 - 2.0 * p3 / r2
        r4 = r + h
        q4 = qv + h * k3q
        p4 = pv + h * k3p
        k4q = p4
        k4p = q4 - q4**3 - 2.0 * p4 / r4
        qv += h * (k1q + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0
        pv += h * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
        if classify_only:
            if qv < 0.0:
                return "cross"
            if qv > grow_cap or pv > 5.0:
                return "under"
        else:
            qs[j + 1] = qv
            ps[j + 1] = pv
    if classify_only:
        return "end"
    return qs, ps


def solve_ground_state(
    r_max: float, n: int, tol: float, cert_tol: float = 1e-6
) -> GroundState:
    """Compute and certify the ground state on (0, r_max] with n nodes.

    r_max >= 15 keeps the e^{-r} tail below ~1e-6 at the boundary; tol
    is the bisection width on Q(0) (<= 1e-8 required, 1e-12 typical).
    """
    if r_max < 15.0:
        raise SolverFailureError(f"r_max={r_max} too small; tail not resolved (need >= 15)")
    if tol > 1e-8:
        raise SolverFailureError(f"tol={tol} too loose (need <= 1e-8)")
    h = r_max / n

    lo, hi = BRACKET_LO, BRACKET_HI
    lo_class = _march(lo, h, n, True)
    hi_class = _march(hi, h, n, True)
    if lo_class == "cross" or hi_class != "cross":
        raise SolverFailureError(
            f"bracket [{lo}, {hi}] does not straddle the decaying amplitude "
            f"(endpoint classes {lo_class!r}, {hi_class!r})"
        )
    max_iter = int(math.ceil(math.log2((hi - lo) / tol))) + 2
    it = 0
    while hi - lo > tol:
        it += 1
        if it > max_iter:
            raise SolverFailureError("bisection failed to contract (iteration cap hit)")
        mid = 0.5 * (lo + hi)
        if _march(mid, h, n, True) == "cross":
            hi = mid
        else:
            lo = mid
    a = 0.5 * (lo + hi)

    qs, ps = _march(a, h, n, False)
    r = h * np.arange(1, n + 1)

    # Tail splice: from the first node below TAIL_SWITCH * Q(0), replace
    # the march by c e^{-r}/r with c matched there.
    below = np.nonzero(qs < TAIL_SWITCH * a)[0]
    if below.size == 0:
        raise SolverFailureError("profile never decayed below the tail threshold; r_max too small")
    im = int(below[0])
    c = qs[im] * r[im] * math.exp(r[im])
    tail = r > r[im]
    qs[tail] = c * np.exp(-r[tail]) / r[tail]
    ps[tail] = -c * np.exp(-r[tail]) * (1.0 / r[tail] + 1.0 / r[tail] ** 2)

    if not (np.all(qs > 0.0) and np.all(np.diff(qs) < 0.0)):
        raise CertificationError("profile not positive and strictly decreasing (excited branch?)")

    # Norms by trapezoid with the 4 pi r^2 measure; the r=0 endpoint has
    # zero weight by the measure, so the stored nodes are the whole rule.
    w = 4.0 * np.pi * h * r * r
    w[-1] *= 0.5
    mass_sq = float(np.dot(w, qs * qs))
    grad_sq = float(np.dot(w, ps * ps))
    l4_4 = float(np.dot(w, qs**4))
    energy = 0.5 * grad_sq - 0.25 * l4_4
    c_gn = 4.0 / (3.0 * math.sqrt(mass_sq * grad_sq))

    res_grad = abs(grad_sq / mass_sq - 3.0)
    res_l4 = abs(l4_4 / mass_sq - 4.0)
    res_e = abs(energy / grad_sq - 1.0 / 6.0)
    if max(res_grad, res_l4, res_e) > cert_tol:
        raise CertificationError(
            "identity residuals exceed certification tolerance: "
            f"|grad/mass-3|={res_grad:.3e} |l4/mass-4|={res_l4:.3e} "
            f"|E/grad-1/6|={res_e:.3e} (cert_tol={cert_tol:.1e})"
        )

    for arr in (r, qs, ps):
        arr.setflags(write=False)
    return GroundState(
        r_grid=r, profile=qs, dprofile=ps, mass_sq=mass_sq, grad_sq=grad_sq,
        l4_4=l4_4, energy=energy, c_gn=c_gn, shoot_value=a, tol=tol,
        tail_c=c, r_match=float(r[im]), iterations=it,
    )


def sample_soliton(
    q: GroundState, grid: Grid, lam: float = 1.0, x0=(0.0, 0.0, 0.0),
    theta: float = 0.0, beta: float = 1.0,
) -> Field:
    """Sample e^{i theta} lam^{3/2} beta^{-1} Q(lam (x/beta - x0)) on a grid.

    lam=beta=1, x0=0, theta=0 gives plain Q. The soliton center in box
    coordinates is beta*x0; the profile tail at the nearest box face must
    be below 1e-8 of the peak, else the box is declared too small.
    """
    if lam <= 0 or beta <= 0:
        raise ValueError("lam and beta must be positive")
    x0 = np.asarray(x0, dtype=float)
    amp = lam**1.5 / beta

    if grid.kind == RADIAL1D:
        if np.any(x0 != 0.0):
            raise ModeError("radial grids only hold centered solitons (x0 must be 0)")
        edge_arg = lam * grid.half_width / beta
        if q.evaluate(edge_arg) / q.shoot_value > 1e-8:
            raise DomainTooSmallError(
                f"soliton tail at r_max is {q.evaluate(edge_arg)/q.shoot_value:.2e} of peak (limit 1e-8)"
            )
        vals = amp * q.evaluate(lam * grid.radii() / beta)
        return Field(grid, vals * np.exp(1j * theta))

    center = beta * x0
    face_dist = grid.half_width - np.max(np.abs(center))
    if face_dist <= 0:
        raise DomainTooSmallError("soliton center outside the box")
    edge_arg = lam * face_dist / beta
    if q.evaluate(edge_arg) / q.shoot_value > 1e-8:
        raise DomainTooSmallError(
            f"soliton tail at the nearest box face is "
            f"{q.evaluate(edge_arg)/q.shoot_value:.2e} of peak (limit 1e-8)"
        )
    X, Y, Z = grid.meshes()
    rr = np.sqrt((X - center[0]) ** 2 + (Y - center[1]) ** 2 + (Z - center[2]) ** 2)
    vals = amp * q.evaluate(lam * rr / beta)
    return Field(grid, vals * np.exp(1j * theta))
