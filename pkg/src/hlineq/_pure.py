"""Pure numpy implementations of the hot kernels.

Same contracts as the compiled ``_core`` extension; used when it is not
built or when ``HLINEQ_PURE=1``.
"""

import math

import numpy as np

_CHUNK = 1 << 14


def collapse(a, q):
    """Row-wise l_q (quasi-)norm of a 2-D array, compensated and scaled."""
    a = np.abs(np.asarray(a, dtype=np.float64))
    if math.isinf(q):
        return a.max(axis=1) if a.shape[1] else np.zeros(a.shape[0])
    out = np.empty(a.shape[0])
    for i, row in enumerate(a):
        s = row.max() if row.size else 0.0
        if s == 0.0:
            out[i] = 0.0
            continue
        out[i] = s * math.fsum((row / s) ** q) ** (1.0 / q)
    return out


def _dual_value(v, q):
    v = np.abs(v)
    if math.isinf(q):
        return v.max(axis=-1)
    if q == 1.0:
        return v.sum(axis=-1)
    return (v ** q).sum(axis=-1) ** (1.0 / q)


def sign_enum(a, q):
    """Max over sign vectors x (x_0 = +1) of ||x @ a||_q.

    Returns ``(value, mask)`` where bit ``i`` of ``mask`` set means
    ``x_i = -1``.  Ties keep the smallest mask.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    rows = a.shape[0]
    if rows == 0:
        return 0.0, 0
    if rows > 62:
        raise ValueError("too many sign bits")
    total = 1 << (rows - 1)
    shifts = np.arange(rows, dtype=np.int64)
    best, best_mask = -1.0, 0
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(total, start + _CHUNK), dtype=np.int64) << 1
        signs = 1.0 - 2.0 * ((masks[:, None] >> shifts) & 1)
        vals = _dual_value(signs @ a, q)
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, best_mask = float(vals[j]), int(masks[j])
    return best, best_mask
