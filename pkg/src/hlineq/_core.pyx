# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: compensated row collapse and Gray-code sign enumeration."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, INFINITY, isinf

cnp.import_array()


cdef inline double _neumaier_add(double s, double x, double* c) noexcept nogil:
    cdef double t = s + x
    if fabs(s) >= fabs(x):
        c[0] += (s - t) + x
    else:
        c[0] += (x - t) + s
    return t


def collapse(const double[:, ::1] a, double q):
    """Row-wise l_q (quasi-)norm of a 2-D array, compensated and scaled."""
    cdef Py_ssize_t rows = a.shape[0], cols = a.shape[1], i, j
    out = np.zeros(rows)
    cdef double[::1] o = out
    cdef double s, acc, comp, v
    with nogil:
        for i in range(rows):
            s = 0.0
            for j in range(cols):
                v = fabs(a[i, j])
                if v > s:
                    s = v
            if s == 0.0:
                o[i] = 0.0
                continue
            if isinf(q):
                o[i] = s
                continue
            acc = 0.0
            comp = 0.0
            for j in range(cols):
                acc = _neumaier_add(acc, pow(fabs(a[i, j]) / s, q), &comp)
            o[i] = s * pow(acc + comp, 1.0 / q)
    return out


cdef inline double _score(double[::1] v, double q) noexcept nogil:
    """Monotone surrogate of ||v||_q: the sum of |v_j|^q without the root."""
    cdef Py_ssize_t j, n = v.shape[0]
    cdef double acc = 0.0, x
    if isinf(q):
        for j in range(n):
            x = fabs(v[j])
            if x > acc:
                acc = x
        return acc
    if q == 1.0:
        for j in range(n):
            acc += fabs(v[j])
        return acc
    if q == 2.0:
        for j in range(n):
            acc += v[j] * v[j]
        return acc
    for j in range(n):
        acc += pow(fabs(v[j]), q)
    return acc


def sign_enum(const double[:, ::1] a, double q):
    """Max over sign vectors x (x_0 = +1) of ||x @ a||_q, by Gray code.

    Returns ``(value, mask)`` where bit ``i`` of ``mask`` set means
    ``x_i = -1``.  The winning value is recomputed from scratch so the
    incremental updates do not leak rounding into the result.  Ties keep
    the first pattern in Gray order, so on ties the mask can differ from
    the Python backend while the value agrees.
    """
    cdef Py_ssize_t rows = a.shape[0], cols = a.shape[1], i, j, bit
    if rows == 0:
        return 0.0, 0
    if rows > 62:
        raise ValueError("too many sign bits")
    cdef long long total = (<long long>1) << (rows - 1), t, mask = 0, best_mask = 0
    v_arr = np.zeros(cols)
    cdef double[::1] v = v_arr
    cdef double best = -1.0, val
    with nogil:
        for i in range(rows):
            for j in range(cols):
                v[j] += a[i, j]
        best = _score(v, q)
        for t in range(1, total):
            bit = 1
            while not (t & ((<long long>1) << (bit - 1))):
                bit += 1
            if mask & ((<long long>1) << bit):
                for j in range(cols):
                    v[j] += 2.0 * a[bit, j]
            else:
                for j in range(cols):
                    v[j] -= 2.0 * a[bit, j]
            mask ^= (<long long>1) << bit
            val = _score(v, q)
            if val > best:
                best = val
                best_mask = mask
    signs = np.ones(rows)
    for i in range(rows):
        if best_mask & ((<long long>1) << i):
            signs[i] = -1.0
    exact = signs @ np.asarray(a)
    if isinf(q):
        best = float(np.abs(exact).max())
    elif q == 1.0:
        best = float(np.abs(exact).sum())
    else:
        best = float((np.abs(exact) ** q).sum() ** (1.0 / q))
    return best, int(best_mask)
