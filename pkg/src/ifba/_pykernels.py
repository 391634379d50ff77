"""Pure-Python numeric kernels.

Reference fallback for the compiled ``_ckernels`` module. Every function
here has an identically named, identically behaving counterpart there;
``ifba.kernels`` picks one at import time.
"""

import numpy as np


def gauss_jordan_inverse(a, pivot_floor):
    """Invert a dense square matrix by Gauss-Jordan elimination.

    Partial pivoting on the column maximum. Returns ``None`` as soon as a
    pivot magnitude falls below ``pivot_floor``.
    """
    n = a.shape[0]
    m = [[float(a[i, j]) for j in range(n)] for i in range(n)]
    inv = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = col
        best = abs(m[col][col])
        for row in range(col + 1, n):
            if abs(m[row][col]) > best:
                best = abs(m[row][col])
                piv = row
        if best < pivot_floor or best == 0.0:
            return None
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            inv[col], inv[piv] = inv[piv], inv[col]
        p = m[col][col]
        mrow = m[col]
        irow = inv[col]
        for j in range(n):
            mrow[j] /= p
            irow[j] /= p
        for row in range(n):
            if row == col:
                continue
            f = m[row][col]
            if f == 0.0:
                continue
            rrow = m[row]
            jrow = inv[row]
            for j in range(n):
                rrow[j] -= f * mrow[j]
                jrow[j] -= f * irow[j]
    return np.array(inv, dtype=np.float64)


def determinant(a):
    """Determinant by partially pivoted elimination (no singularity cutoff)."""
    n = a.shape[0]
    m = [[float(a[i, j]) for j in range(n)] for i in range(n)]
    det = 1.0
    for col in range(n):
        piv = col
        best = abs(m[col][col])
        for row in range(col + 1, n):
            if abs(m[row][col]) > best:
                best = abs(m[row][col])
                piv = row
        if best == 0.0:
            return 0.0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        p = m[col][col]
        det *= p
        for row in range(col + 1, n):
            f = m[row][col] / p
            if f == 0.0:
                continue
            for j in range(col, n):
                m[row][j] -= f * m[col][j]
    return det


def null_vector(a, pivot_floor):
    """Unit (Euclidean) vector ``v`` with ``a @ v`` ~ 0, or ``None``.

    Reduces ``a`` to row echelon form with partial pivoting; the first
    column whose best pivot is below ``pivot_floor`` is free. Setting that
    free variable to 1 (later free variables to 0) and back-substituting
    through the pivot columns gives the kernel direction.
    """
    n_rows, n_cols = a.shape
    m = [[float(a[i, j]) for j in range(n_cols)] for i in range(n_rows)]
    pivot_cols = []
    row = 0
    free = -1
    for col in range(n_cols):
        if row >= n_rows:
            free = col
            break
        piv = row
        best = abs(m[row][col])
        for r in range(row + 1, n_rows):
            if abs(m[r][col]) > best:
                best = abs(m[r][col])
                piv = r
        if best < pivot_floor or best == 0.0:
            free = col
            break
        if piv != row:
            m[row], m[piv] = m[piv], m[row]
        p = m[row][col]
        for r in range(row + 1, n_rows):
            f = m[r][col] / p
            if f == 0.0:
                continue
            for j in range(col, n_cols):
                m[r][j] -= f * m[row][j]
        pivot_cols.append(col)
        row += 1
    if free < 0:
        return None
    v = [0.0] * n_cols
    v[free] = 1.0
    for k in range(len(pivot_cols) - 1, -1, -1):
        col = pivot_cols[k]
        acc = 0.0
        for j in range(col + 1, n_cols):
            acc += m[k][j] * v[j]
        v[col] = -acc / m[k][col]
    norm = sum(c * c for c in v) ** 0.5
    return np.array([c / norm for c in v], dtype=np.float64)


def cauchy_product(a, b):
    """Cauchy product of two coefficient vectors, truncated to ``len(a)``."""
    d = a.shape[0]
    out = [0.0] * d
    for k in range(d):
        acc = 0.0
        for i in range(k + 1):
            acc += a[i] * b[k - i]
        out[k] = acc
    return np.array(out, dtype=np.float64)


def batch_cauchy_product(a, b):
    """Row-wise truncated Cauchy product of two ``(N, d)`` arrays."""
    out = np.empty_like(a, dtype=np.float64)
    for row in range(a.shape[0]):
        out[row] = cauchy_product(a[row], b[row])
    return out


def series_reciprocal(a, const_floor):
    """Coefficients of ``1 / a`` truncated to ``len(a)``, or ``None``.

    Solves ``a * b = 1`` degree by degree. ``None`` when the constant
    coefficient magnitude is below ``const_floor``.
    """
    d = a.shape[0]
    a0 = float(a[0])
    if abs(a0) < const_floor or a0 == 0.0:
        return None
    b = [0.0] * d
    b[0] = 1.0 / a0
    for k in range(1, d):
        acc = 0.0
        for i in range(1, k + 1):
            acc += a[i] * b[k - i]
        b[k] = -acc / a0
    return np.array(b, dtype=np.float64)
