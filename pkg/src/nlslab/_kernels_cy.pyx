# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled pointwise kernels and compensated reductions.

Complex arrays are walked as interleaved (re, im) float64 pairs, which
keeps the hot loops free of complex-type plumbing and lets the compiler
vectorize them. The reductions use Kahan compensation; the build must
not enable -ffast-math, which would legalize reassociating the
compensation away.
"""

import numpy as np

from libc.math cimport cos, sin

NAME = "cython"


cdef void _phase_pairs(double[::1] v, double c) noexcept nogil:
    cdef Py_ssize_t i, n = v.shape[0] // 2
    cdef double re, im, t, s, co
    for i in range(n):
        re = v[2 * i]
        im = v[2 * i + 1]
        t = c * (re * re + im * im)
        s = sin(t)
        co = cos(t)
        v[2 * i] = re * co - im * s
        v[2 * i + 1] = re * s + im * co


cdef void _mul_pairs(double[::1] v, const double[::1] m) noexcept nogil:
    cdef Py_ssize_t i, n = v.shape[0] // 2
    cdef double re, im, a, b
    for i in range(n):
        re = v[2 * i]
        im = v[2 * i + 1]
        a = m[2 * i]
        b = m[2 * i + 1]
        v[2 * i] = re * a - im * b
        v[2 * i + 1] = re * b + im * a


cdef void _abs2_pairs(const double[::1] v, double[::1] out) noexcept nogil:
    cdef Py_ssize_t i, n = out.shape[0]
    for i in range(n):
        out[i] = v[2 * i] * v[2 * i] + v[2 * i + 1] * v[2 * i + 1]


cdef double _kahan_abs2(const double[::1] v) noexcept nogil:
    cdef Py_ssize_t i, n = v.shape[0] // 2
    cdef double s = 0.0, comp = 0.0, x, y, t
    for i in range(n):
        x = v[2 * i] * v[2 * i] + v[2 * i + 1] * v[2 * i + 1]
        y = x - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


cdef double _kahan_abs4(const double[::1] v) noexcept nogil:
    cdef Py_ssize_t i, n = v.shape[0] // 2
    cdef double s = 0.0, comp = 0.0, x, y, t
    for i in range(n):
        x = v[2 * i] * v[2 * i] + v[2 * i + 1] * v[2 * i + 1]
        x = x * x
        y = x - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


cdef double _kahan_weighted(const double[::1] v, const double[::1] w) noexcept nogil:
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double s = 0.0, comp = 0.0, x, y, t
    for i in range(n):
        x = w[i] * (v[2 * i] * v[2 * i] + v[2 * i + 1] * v[2 * i + 1])
        y = x - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


def _pairs(u):
    return u.view(np.float64).reshape(-1)


def _const_pairs(m):
    return m.view(np.float64).reshape(-1)


def abs2(u):
    out = np.empty(u.shape, dtype=np.float64)
    _abs2_pairs(_pairs(u), out.reshape(-1))
    return out


def nonlinear_phase_inplace(u, double c):
    _phase_pairs(_pairs(u), c)


def multiply_inplace(u, m):
    _mul_pairs(_pairs(u), _const_pairs(m))


def sum_abs2(u):
    return _kahan_abs2(_pairs(u))


def sum_abs4(u):
    return _kahan_abs4(_pairs(u))


def weighted_sum_abs2(u, w):
    w = np.ascontiguousarray(w, dtype=np.float64)
    return _kahan_weighted(_pairs(u), w.reshape(-1))
