# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: nearest-palette assignment and the SQ iteration."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, INFINITY

cnp.import_array()


def assign_nearest(const double[:, ::1] points, const double[:, ::1] palette):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t n_colors = palette.shape[0]
    labels_arr = np.empty(n, dtype=np.intp)
    best_arr = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t[::1] labels = labels_arr
    cdef double[::1] best = best_arr
    cdef Py_ssize_t i, k, best_k
    cdef double dx, dy, dz, sq, b
    with nogil:
        for i in range(n):
            best_k = 0
            b = INFINITY
            for k in range(n_colors):
                dx = points[i, 0] - palette[k, 0]
                dy = points[i, 1] - palette[k, 1]
                dz = points[i, 2] - palette[k, 2]
                sq = dx * dx + dy * dy + dz * dz
                if k == 0 or sq < b:
                    b = sq
                    best_k = k
            labels[i] = best_k
            best[i] = b
    return labels_arr, best_arr


cdef inline double _clamp01(double v) noexcept nogil:
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


def sq_iterate(const double[:, ::1] points, double[:, ::1] palette,
               const cnp.int64_t[::1] indices, double rho, double r):
    cdef Py_ssize_t n_steps = indices.shape[0]
    cdef Py_ssize_t n_colors = palette.shape[0]
    cdef Py_ssize_t t, k, best_k, i
    cdef double x0, x1, x2, d0, d1, d2, sq, best, coef
    with nogil:
        for t in range(n_steps):
            i = indices[t]
            x0 = points[i, 0]
            x1 = points[i, 1]
            x2 = points[i, 2]
            best_k = 0
            best = INFINITY
            for k in range(n_colors):
                d0 = palette[k, 0] - x0
                d1 = palette[k, 1] - x1
                d2 = palette[k, 2] - x2
                sq = d0 * d0 + d1 * d1 + d2 * d2
                if sq < best:
                    best = sq
                    best_k = k
            if best == 0.0:
                continue
            coef = r * pow(sqrt(best), r - 2.0)
            palette[best_k, 0] = _clamp01(palette[best_k, 0] - rho * (coef * (palette[best_k, 0] - x0)))
            palette[best_k, 1] = _clamp01(palette[best_k, 1] - rho * (coef * (palette[best_k, 1] - x1)))
            palette[best_k, 2] = _clamp01(palette[best_k, 2] - rho * (coef * (palette[best_k, 2] - x2)))
