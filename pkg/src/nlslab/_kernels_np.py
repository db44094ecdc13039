"""Pure-numpy kernel backend.

Same call signatures as the compiled backend in _kernels_cy.pyx; the
dispatcher in kernels.py picks whichever is available (or whichever
NLSLAB_KERNELS demands). All functions accept arrays of any shape and
treat them elementwise; "inplace" functions mutate their first argument
and return it.
"""

import numpy as np

NAME = "numpy"


def abs2(u):
    """|u|^2 as a real array."""
    return u.real * u.real + u.imag * u.imag


def nonlinear_phase_inplace(u, c):
    """u <- u * exp(i c |u|^2), the exact cubic-phase subflow."""
    u *= np.exp(1j * c * abs2(u))
    return u


def multiply_inplace(u, m):
    """u <- u * m elementwise (m real or complex)."""
    u *= m
    return u


def sum_abs2(u):
    """sum |u|^2 (unweighted; caller applies quadrature weights)."""
    return float(np.sum(abs2(u)))


def sum_abs4(u):
    """sum |u|^4."""
    a = abs2(u)
    return float(np.sum(a * a))


def weighted_sum_abs2(u, w):
    """sum w |u|^2 for a real weight array."""
    return float(np.sum(w * abs2(u)))
