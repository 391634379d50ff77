# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels; same contracts as ``ifba._pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


cdef inline void _swap_rows(double[:, ::1] m, Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t k
    cdef double tmp
    for k in range(m.shape[1]):
        tmp = m[i, k]
        m[i, k] = m[j, k]
        m[j, k] = tmp


def gauss_jordan_inverse(a, double pivot_floor):
    cdef Py_ssize_t n = a.shape[0]
    cdef double[:, ::1] m = np.array(a, dtype=np.float64, order="C", copy=True)
    out = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] inv = out
    cdef Py_ssize_t col, row, piv, j
    cdef double best, p, f
    with nogil:
        for col in range(n):
            piv = col
            best = fabs(m[col, col])
            for row in range(col + 1, n):
                if fabs(m[row, col]) > best:
                    best = fabs(m[row, col])
                    piv = row
            if best < pivot_floor or best == 0.0:
                with gil:
                    return None
            if piv != col:
                _swap_rows(m, col, piv)
                _swap_rows(inv, col, piv)
            p = m[col, col]
            for j in range(n):
                m[col, j] /= p
                inv[col, j] /= p
            for row in range(n):
                if row == col:
                    continue
                f = m[row, col]
                if f == 0.0:
                    continue
                for j in range(n):
                    m[row, j] -= f * m[col, j]
                    inv[row, j] -= f * inv[col, j]
    return out


def determinant(a):
    cdef Py_ssize_t n = a.shape[0]
    cdef double[:, ::1] m = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t col, row, piv, j
    cdef double best, p, f
    cdef double det = 1.0
    with nogil:
        for col in range(n):
            piv = col
            best = fabs(m[col, col])
            for row in range(col + 1, n):
                if fabs(m[row, col]) > best:
                    best = fabs(m[row, col])
                    piv = row
            if best == 0.0:
                det = 0.0
                break
            if piv != col:
                _swap_rows(m, col, piv)
                det = -det
            p = m[col, col]
            det *= p
            for row in range(col + 1, n):
                f = m[row, col] / p
                if f == 0.0:
                    continue
                for j in range(col, n):
                    m[row, j] -= f * m[col, j]
    return det


def null_vector(a, double pivot_floor):
    cdef Py_ssize_t n_rows = a.shape[0]
    cdef Py_ssize_t n_cols = a.shape[1]
    cdef double[:, ::1] m = np.array(a, dtype=np.float64, order="C", copy=True)
    pivots = np.zeros(n_cols, dtype=np.intp)
    cdef Py_ssize_t[::1] pivot_cols = pivots
    cdef Py_ssize_t n_piv = 0
    cdef Py_ssize_t row = 0
    cdef Py_ssize_t free = -1
    cdef Py_ssize_t col, r, piv, j, k
    cdef double best, p, f, acc, norm
    with nogil:
        for col in range(n_cols):
            if row >= n_rows:
                free = col
                break
            piv = row
            best = fabs(m[row, col])
            for r in range(row + 1, n_rows):
                if fabs(m[r, col]) > best:
                    best = fabs(m[r, col])
                    piv = r
            if best < pivot_floor or best == 0.0:
                free = col
                break
            if piv != row:
                _swap_rows(m, row, piv)
            p = m[row, col]
            for r in range(row + 1, n_rows):
                f = m[r, col] / p
                if f == 0.0:
                    continue
                for j in range(col, n_cols):
                    m[r, j] -= f * m[row, j]
            pivot_cols[n_piv] = col
            n_piv += 1
            row += 1
    if free < 0:
        return None
    out = np.zeros(n_cols, dtype=np.float64)
    cdef double[::1] v = out
    v[free] = 1.0
    with nogil:
        for k in range(n_piv - 1, -1, -1):
            col = pivot_cols[k]
            acc = 0.0
            for j in range(col + 1, n_cols):
                acc += m[k, j] * v[j]
            v[col] = -acc / m[k, col]
        norm = 0.0
        for j in range(n_cols):
            norm += v[j] * v[j]
        norm = sqrt(norm)
        for j in range(n_cols):
            v[j] /= norm
    return out


def cauchy_product(a, b):
    cdef const double[::1] x = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t d = x.shape[0]
    out = np.empty(d, dtype=np.float64)
    cdef double[::1] z = out
    cdef Py_ssize_t k, i
    cdef double acc
    with nogil:
        for k in range(d):
            acc = 0.0
            for i in range(k + 1):
                acc += x[i] * y[k - i]
            z[k] = acc
    return out


def batch_cauchy_product(a, b):
    cdef const double[:, ::1] x = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] y = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t rows = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    out = np.empty((rows, d), dtype=np.float64)
    cdef double[:, ::1] z = out
    cdef Py_ssize_t row, k, i
    cdef double acc
    with nogil:
        for row in range(rows):
            for k in range(d):
                acc = 0.0
                for i in range(k + 1):
                    acc += x[row, i] * y[row, k - i]
                z[row, k] = acc
    return out


def series_reciprocal(a, double const_floor):
    cdef const double[::1] x = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t d = x.shape[0]
    cdef double a0 = x[0]
    if fabs(a0) < const_floor or a0 == 0.0:
        return None
    out = np.empty(d, dtype=np.float64)
    cdef double[::1] b = out
    cdef Py_ssize_t k, i
    cdef double acc
    b[0] = 1.0 / a0
    with nogil:
        for k in range(1, d):
            acc = 0.0
            for i in range(1, k + 1):
                acc += x[i] * b[k - i]
            b[k] = -acc / a0
    return out
