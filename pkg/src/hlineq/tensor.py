"""Dense coefficient tensors of m-linear forms and nested mixed norms.

A form ``T`` on ``(R^n)^m`` is stored through its coefficients
``T(e_{j_1}, ..., e_{j_m})`` in a read-only ``(n,)*m`` float64 array
(row-major, axis 0 slowest).  Axes and entry indices are 0-based here.
"""

from __future__ import annotations

import json
import math
import struct
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

from hlineq import kernels
from hlineq.exponents import ExponentLike, ExtendedExponent

__all__ = [
    "CoefficientTensor",
    "as_float_exponent",
    "mixed_norm",
    "flat_norm",
    "diagonal_form",
    "littlewood_power",
    "random_unimodular",
    "random_gaussian",
    "lift",
    "slice_tensor",
    "make_rng",
    "save_tensor",
    "load_tensor",
]


class CoefficientTensor:
    """Immutable coefficient tensor of an m-linear form with common dimension n."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        arr = np.array(coeffs, dtype=np.float64, copy=True)
        if arr.ndim < 1:
            raise ValueError("a form needs at least one argument")
        if len(set(arr.shape)) != 1 or arr.shape[0] < 1:
            raise ValueError(f"every axis must have the same positive length, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.flags.writeable = False
        self._c = arr

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def m(self) -> int:
        return self._c.ndim

    @property
    def n(self) -> int:
        return self._c.shape[0]

    def __call__(self, *xs) -> float:
        """Evaluate ``T(x^(1), ..., x^(m))``."""
        if len(xs) != self.m:
            raise ValueError(f"expected {self.m} vectors")
        out = self._c
        for x in reversed(xs):
            out = out @ np.asarray(x, dtype=np.float64)
        return float(out)

    def scaled(self, lam: float) -> "CoefficientTensor":
        return CoefficientTensor(lam * self._c)

    def permuted(self, perm: Sequence[int]) -> "CoefficientTensor":
        """Tensor of ``T'(x_0, ..) = T(x_{perm^-1}..)``: axis ``i`` of the result is axis ``perm[i]``."""
        return CoefficientTensor(np.transpose(self._c, perm))

    def __eq__(self, other):
        if not isinstance(other, CoefficientTensor):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash((self._c.shape, self._c.tobytes()))

    def __repr__(self):
        return f"CoefficientTensor(m={self.m}, n={self.n})"


def as_float_exponent(q: Union[ExponentLike, float]) -> float:
    if isinstance(q, ExtendedExponent):
        return float(q)
    if isinstance(q, float):
        if not q > 0:
            raise ValueError(f"exponent must be positive, got {q}")
        return q
    return float(ExtendedExponent(q))


def mixed_norm(t: CoefficientTensor, spec: Sequence[Union[ExponentLike, float]]) -> float:
    """Nested norm, innermost axis first: axis ``m-1`` collapses with ``spec[-1]``.

    Exponents below 1 use the same formula (a quasi-norm).  ``inf``
    replaces the sum by a maximum.
    """
    if len(spec) != t.m:
        raise ValueError(f"spec has {len(spec)} exponents for an arity-{t.m} tensor")
    qs = [as_float_exponent(q) for q in spec]
    cur = np.ascontiguousarray(t.coeffs)
    n = t.n
    for q in reversed(qs):
        cur = kernels.collapse(np.ascontiguousarray(cur.reshape(-1, n)), q)
    return float(cur[0])


def make_rng(seed: int) -> np.random.Generator:
    """The package's reproducible generator (PCG64)."""
    return np.random.Generator(np.random.PCG64(seed))


def diagonal_form(m: int, n: int) -> CoefficientTensor:
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    c = np.zeros((n,) * m)
    idx = np.arange(n)
    c[(idx,) * m] = 1.0
    return CoefficientTensor(c)


_LITTLEWOOD = np.array([[1.0, 1.0], [1.0, -1.0]])


def littlewood_power(m: int, k: int) -> CoefficientTensor:
    """k-fold Kronecker power of ``[[1, 1], [1, -1]]`` (bilinear only)."""
    if m != 2:
        raise ValueError("Kronecker powers are bilinear (m = 2)")
    if k < 1:
        raise ValueError("k must be >= 1")
    out = _LITTLEWOOD
    for _ in range(k - 1):
        out = np.kron(out, _LITTLEWOOD)
    return CoefficientTensor(out)


def random_unimodular(m: int, n: int, seed: int) -> CoefficientTensor:
    """Independent +-1 coefficients from the seeded generator."""
    signs = make_rng(seed).integers(0, 2, size=(n,) * m)
    return CoefficientTensor(1.0 - 2.0 * signs)


def random_gaussian(m: int, n: int, seed: int) -> CoefficientTensor:
    return CoefficientTensor(make_rng(seed).standard_normal(size=(n,) * m))


def lift(s: CoefficientTensor, k: int) -> CoefficientTensor:
    """Prepend ``k`` axes: ``T(x^1..x^m) = x^1_0 ... x^k_0 S(x^{k+1}..x^m)``; ``||T|| = ||S||``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    c = np.zeros((s.n,) * (s.m + k))
    c[(0,) * k] = s.coeffs
    return CoefficientTensor(c)


def slice_tensor(t: CoefficientTensor, fixed: Mapping[int, int]) -> CoefficientTensor:
    """Fix the axes in ``fixed`` (axis -> basis index); the rest stay in order."""
    if not fixed or len(fixed) >= t.m:
        raise ValueError("fix at least one axis and leave at least one free")
    if any(a < 0 or a >= t.m for a in fixed):
        raise IndexError("axis out of range")
    index = []
    for axis in range(t.m):
        if axis in fixed:
            j = fixed[axis]
            if not 0 <= j < t.n:
                raise IndexError(f"index {j} out of range for n = {t.n}")
            index.append(j)
        else:
            index.append(slice(None))
    return CoefficientTensor(t.coeffs[tuple(index)])


# --- serialization -----------------------------------------------------------

_MAGIC = b"HLTN"
FORMAT_TAG = "hlineq-tensor"


def _header(t: CoefficientTensor) -> dict:
    return {
        "format": FORMAT_TAG,
        "version": 1,
        "m": t.m,
        "n": t.n,
        "ordering": "row-major",
        "scalar": "float64-le",
    }


def save_tensor(path, t: CoefficientTensor, fmt: str | None = None) -> Path:
    """Write ``t`` as JSON (``.json``) or as a binary container (anything else).

    Binary layout: ``b"HLTN"``, little-endian uint32 header length, the JSON
    header, then ``n**m`` little-endian float64 values.
    """
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "bin")
    head = _header(t)
    if fmt == "json":
        doc = dict(head, coeffs=[float(x) for x in t.coeffs.ravel()])
        path.write_text(json.dumps(doc) + "\n")
    elif fmt == "bin":
        raw = json.dumps(head, sort_keys=True).encode()
        with path.open("wb") as fh:
            fh.write(_MAGIC + struct.pack("<I", len(raw)) + raw)
            fh.write(np.ascontiguousarray(t.coeffs, dtype="<f8").tobytes())
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def _check_header(head: dict) -> tuple[int, int]:
    if head.get("format") != FORMAT_TAG or head.get("ordering") != "row-major":
        raise ValueError("not an hlineq tensor file")
    m, n = int(head["m"]), int(head["n"])
    if m < 1 or n < 1:
        raise ValueError("bad tensor shape in header")
    return m, n


def load_tensor(path) -> CoefficientTensor:
    path = Path(path)
    data = path.read_bytes()
    if data[:4] == _MAGIC:
        (hlen,) = struct.unpack("<I", data[4:8])
        head = json.loads(data[8 : 8 + hlen])
        m, n = _check_header(head)
        body = np.frombuffer(data[8 + hlen :], dtype="<f8")
        if body.size != n**m:
            raise ValueError(f"expected {n ** m} values, found {body.size}")
        return CoefficientTensor(body.reshape((n,) * m))
    doc = json.loads(data)
    m, n = _check_header(doc)
    coeffs = np.asarray(doc["coeffs"], dtype=np.float64)
    if coeffs.size != n**m:
        raise ValueError(f"expected {n ** m} values, found {coeffs.size}")
    return CoefficientTensor(coeffs.reshape((n,) * m))


def flat_norm(t: CoefficientTensor, q: float) -> float:
    """Flat l_q norm of all coefficients (reference for the nested collapse)."""
    a = np.abs(t.coeffs.ravel())
    if math.isinf(q):
        return float(a.max())
    s = a.max()
    return 0.0 if s == 0 else float(s * math.fsum((a / s) ** q) ** (1.0 / q))
