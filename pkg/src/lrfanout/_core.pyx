# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: power-law strength sums and the controlled-X pulse kernel.

Mirrors ``_core_py``; results agree with the numpy fallback to floating-point
rounding (summation order may differ by an ulp or two).
"""
from libc.math cimport cos, sin

import numpy as np

COMPILED = True


def strength_sums_1d(const long long[::1] cluster_x, const long long[::1] target_x,
                     const double[::1] powtab):
    """Per-target sum of powtab[|x_t - x_c|] over all cluster coordinates."""
    cdef Py_ssize_t nc = cluster_x.shape[0]
    cdef Py_ssize_t nt = target_x.shape[0]
    out = np.empty(nt, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    cdef long long xt, d
    cdef double acc
    for j in range(nt):
        xt = target_x[j]
        acc = 0.0
        for i in range(nc):
            d = xt - cluster_x[i]
            if d < 0:
                d = -d
            acc += powtab[d]
        o[j] = acc
    return out


def strength_sums_nd(const long long[:, ::1] cluster, const long long[:, ::1] target,
                     const double[::1] powtab_sq):
    """Per-target sum of powtab_sq[squared distance] over all cluster sites."""
    cdef Py_ssize_t nc = cluster.shape[0]
    cdef Py_ssize_t nt = target.shape[0]
    cdef Py_ssize_t ndim = cluster.shape[1]
    out = np.empty(nt, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j, d
    cdef long long dx, sq
    cdef double acc
    for j in range(nt):
        acc = 0.0
        for i in range(nc):
            sq = 0
            for d in range(ndim):
                dx = target[j, d] - cluster[i, d]
                sq += dx * dx
            acc += powtab_sq[sq]
        o[j] = acc
    return out


def min_sqdist_nd(const long long[:, ::1] points, const long long[:, ::1] candidates):
    """Minimum squared distance from each candidate to the point set."""
    cdef Py_ssize_t npt = points.shape[0]
    cdef Py_ssize_t nc = candidates.shape[0]
    cdef Py_ssize_t ndim = points.shape[1]
    out = np.empty(nc, dtype=np.int64)
    cdef long long[::1] o = out
    cdef Py_ssize_t i, j, d
    cdef long long dx, sq, best
    for j in range(nc):
        best = -1
        for i in range(npt):
            sq = 0
            for d in range(ndim):
                dx = candidates[j, d] - points[i, d]
                sq += dx * dx
            if best < 0 or sq < best:
                best = sq
        o[j] = best
    return out


def apply_ctrl_x(double complex[:, ::1] amps, const long long[::1] ctrl_shifts,
                 const double[::1] strengths, Py_ssize_t target_shift,
                 double duration, Py_ssize_t phase_shift):
    """In-place exp(-i t sum_i h_i |1><1|_i X_target) on batched amplitudes.

    ``amps`` has shape (2**n, batch); bit positions are shifts from the least
    significant bit.  When ``phase_shift`` >= 0 the diag(1, i) correction is
    applied on that bit afterwards.
    """
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t nb = amps.shape[1]
    cdef Py_ssize_t half = dim >> 1
    cdef Py_ssize_t nctl = ctrl_shifts.shape[0]
    cdef Py_ssize_t g, b, k
    cdef long long i0, i1, tk
    cdef double th, c, s
    cdef double complex a0, a1, f
    tk = (<long long>1) << target_shift
    for g in range(half):
        i0 = (((<long long>g) >> target_shift) << (target_shift + 1)) | ((<long long>g) & (tk - 1))
        i1 = i0 | tk
        th = 0.0
        for k in range(nctl):
            if (i0 >> ctrl_shifts[k]) & 1:
                th += strengths[k]
        th *= duration
        c = cos(th)
        s = sin(th)
        f = 1.0
        if phase_shift >= 0 and ((i0 >> phase_shift) & 1):
            f = 1j
        for b in range(nb):
            a0 = amps[i0, b]
            a1 = amps[i1, b]
            amps[i0, b] = f * (c * a0 - 1j * s * a1)
            amps[i1, b] = f * (c * a1 - 1j * s * a0)
