"""Grids for the two discretizations.

periodic3d: Fourier collocation on the cube [-L, L)^3 with n points per
axis, so spacing h = 2L/n and wavenumbers k in (pi/L) * {-n/2, ..., n/2-1}.
Integrals use the midpoint rule sum(f) * h^3, which is the quadrature
consistent with the discrete Fourier transform (exact for band-limited
integrands).

radial1d: uniform samples of u(r) at r_j = (j+1) h, j = 0..n-1, with
h = r_max/n, covering (0, r_max]. Integrals use the trapezoid rule with
the 4 pi r^2 measure; the r = 0 endpoint carries zero weight because of
the r^2 factor, so only the stored nodes enter.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft

PERIODIC3D = "periodic3d"
RADIAL1D = "radial1d"


@dataclass(frozen=True)
class Grid:
    """Immutable grid descriptor; heavy arrays are built lazily and cached."""

    kind: str
    n: int
    half_width: float  # box half-width L, or r_max in radial mode

    def __post_init__(self):
        if self.kind not in (PERIODIC3D, RADIAL1D):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.n <= 0:
            raise ValueError("n must be positive")
        if self.kind == PERIODIC3D and (self.n & (self.n - 1)) != 0:
            raise ValueError("periodic3d grid needs n to be a power of two")
        if not (self.half_width > 0):
            raise ValueError("half_width must be positive")

    @property
    def spacing(self) -> float:
        if self.kind == PERIODIC3D:
            return 2.0 * self.half_width / self.n
        return self.half_width / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * 3 if self.kind == PERIODIC3D else (self.n,)

    @property
    def cell_volume(self) -> float:
        """Quadrature weight of one periodic cell (h^3)."""
        return self.spacing**3

    # ---- coordinates -------------------------------------------------

    def axis(self) -> np.ndarray:
        """1D coordinate axis: box axis x_j = -L + j h, or radii r_j = (j+1) h."""
        if self.kind == PERIODIC3D:
            return -self.half_width + self.spacing * np.arange(self.n)
        return self.spacing * np.arange(1, self.n + 1)

    def radii(self) -> np.ndarray:
        if self.kind != RADIAL1D:
            raise ValueError("radii() is for radial grids")
        return self.axis()

    def meshes(self):
        """Coordinate meshes X, Y, Z (periodic3d), memoized per grid."""
        return _meshes(self)

    def radius_mesh(self) -> np.ndarray:
        """|x| measured from the box center (periodic3d) or the radii (radial)."""
        if self.kind == RADIAL1D:
            return self.axis()
        return _radius_mesh(self)

    # ---- spectral data -----------------------------------------------

    def wavenumbers(self) -> np.ndarray:
        """1D wavenumber axis in FFT order."""
        if self.kind != PERIODIC3D:
            raise ValueError("wavenumbers are for periodic grids")
        return 2.0 * np.pi * scipy.fft.fftfreq(self.n, d=self.spacing)

    def ksq_mesh(self) -> np.ndarray:
        """|k|^2 on the 3D spectral grid (FFT order), memoized."""
        return _ksq_mesh(self)

    def dealias_mask(self) -> np.ndarray:
        """Boolean 2/3-rule mask on the 3D spectral grid, memoized."""
        return _dealias_mask(self)

    # ---- quadrature --------------------------------------------------

    def quad_weights(self) -> np.ndarray:
        """Radial quadrature weights: integral(f) ~ sum(w * f(r_j))."""
        if self.kind != RADIAL1D:
            raise ValueError("use cell_volume for periodic quadrature")
        return _radial_weights(self)

    def integrate(self, samples: np.ndarray) -> float:
        """Integrate real samples over the grid's measure."""
        if self.kind == PERIODIC3D:
            return float(np.sum(samples)) * self.cell_volume
        return float(np.dot(self.quad_weights(), samples))


def _freeze(*arrays):
    """Cached arrays are shared between callers; make mutation loud."""
    for a in arrays:
        a.setflags(write=False)
    return arrays if len(arrays) > 1 else arrays[0]


@lru_cache(maxsize=8)
def _meshes(grid: Grid):
    ax = grid.axis()
    return _freeze(*np.meshgrid(ax, ax, ax, indexing="ij"))

@lru_cache(maxsize=8)
def _radius_mesh(grid: Grid) -> np.ndarray:
    X, Y, Z = _meshes(grid)
    return _freeze(np.sqrt(X * X + Y * Y + Z * Z))

@lru_cache(maxsize=8)
def _ksq_mesh(grid: Grid) -> np.ndarray:
    k = grid.wavenumbers()
    kx, ky, kz = np.meshgrid(k, k, k, indexing="ij")
    return _freeze(kx * kx + ky * ky + kz * kz)

@lru_cache(maxsize=8)
def _dealias_mask(grid: Grid) -> np.ndarray:
    k = grid.wavenumbers()
    kmax = np.max(np.abs(k))
    keep = np.abs(k) <= (2.0 / 3.0) * kmax
    return _freeze(keep[:, None, None] & keep[None, :, None] & keep[None, None, :])

@lru_cache(maxsize=8)
def _radial_weights(grid: Grid) -> np.ndarray:
    r = grid.axis()
    w = 4.0 * np.pi * grid.spacing * r * r
    w[-1] *= 0.5  # trapezoid endpoint at r_max; the r=0 end has zero measure
    return _freeze(w)
