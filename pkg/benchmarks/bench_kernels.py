"""Timing comparison of the compiled kernels against the numpy fallback.

Both backends are imported directly (the package-level selection in
nlslab.kernels is bypassed) and run on identical arrays, so the table
shows pure kernel cost. A full periodic Strang step through the public
API is timed at the end under whichever backend the package selected.

Run:  python3 benchmarks/bench_kernels.py [--n3d 128] [--nrad 8192] [--reps 7]
"""

import argparse
import time

import numpy as np

from nlslab import _kernels_np
from nlslab import kernels as active

try:
    from nlslab import _kernels_cy
except ImportError:
    _kernels_cy = None


def best_of(fn, reps):
    """Minimum wall time over reps calls, seconds."""
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_pair(name, make_args, call, reps):
    """Time one kernel under both backends on freshly built arrays.

    make_args is re-invoked per backend so the in-place kernels never
    see each other's output.
    """
    row = {"name": name}
    for label, mod in (("numpy", _kernels_np), ("cython", _kernels_cy)):
        if mod is None:
            row[label] = float("nan")
            continue
        args = make_args()
        row[label] = best_of(lambda: call(mod, *args), reps)
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n3d", type=int, default=128, help="periodic grid size per axis")
    ap.add_argument("--nrad", type=int, default=8192, help="radial grid size")
    ap.add_argument("--reps", type=int, default=7, help="repetitions, best-of")
    ap.add_argument("--seed", type=int, default=1234)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    shape3 = (args.n3d,) * 3

    def field3():
        return (rng.standard_normal(shape3) + 1j * rng.standard_normal(shape3))

    def mult3():
        return np.exp(1j * rng.standard_normal(shape3))

    def fieldr():
        return rng.standard_normal(args.nrad) + 1j * rng.standard_normal(args.nrad)

    w = np.abs(rng.standard_normal(args.nrad))

    rows = [
        bench_pair(
            f"nonlinear_phase_inplace {args.n3d}^3",
            lambda: (field3(), 1e-3),
            lambda m, u, dt: m.nonlinear_phase_inplace(u, dt),
            args.reps,
        ),
        bench_pair(
            f"multiply_inplace        {args.n3d}^3",
            lambda: (field3(), mult3()),
            lambda m, u, ph: m.multiply_inplace(u, ph),
            args.reps,
        ),
        bench_pair(
            f"abs2                    {args.n3d}^3",
            lambda: (field3(),),
            lambda m, u: m.abs2(u),
            args.reps,
        ),
        bench_pair(
            f"sum_abs2                {args.n3d}^3",
            lambda: (field3(),),
            lambda m, u: m.sum_abs2(u),
            args.reps,
        ),
        bench_pair(
            f"sum_abs4                {args.n3d}^3",
            lambda: (field3(),),
            lambda m, u: m.sum_abs4(u),
            args.reps,
        ),
        bench_pair(
            f"weighted_sum_abs2   radial {args.nrad}",
            lambda: (fieldr(), w),
            lambda m, u, wt: m.weighted_sum_abs2(u, wt),
            args.reps,
        ),
    ]

    print(f"{'kernel':<34} {'numpy':>10} {'cython':>10} {'speedup':>8}")
    for row in rows:
        tn, tc = row["numpy"], row["cython"]
        ratio = tn / tc if tc == tc and tc > 0 else float("nan")
        print(f"{row['name']:<34} {tn * 1e3:>8.2f}ms {tc * 1e3:>8.2f}ms {ratio:>7.2f}x")

    # end-to-end: one periodic Strang step under the selected backend
    from nlslab import Field, Grid, PERIODIC3D
    from nlslab.evolution import step

    g = Grid(PERIODIC3D, args.n3d, 16.0)
    X, Y, Z = g.meshes()
    u0 = Field(g, 2.0 * np.exp(-(X**2 + Y**2 + Z**2) / 4.0).astype(complex))
    step(u0, 1e-3)  # warm the stepper caches
    t = best_of(lambda: step(u0, 1e-3), args.reps)
    print(f"\nfull periodic step n={args.n3d} ({active.BACKEND} backend): {t * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
