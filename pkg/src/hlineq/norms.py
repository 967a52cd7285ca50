"""Two-sided estimates of the operator norm of an m-linear form.

``||T|| = sup |T(x^1, ..., x^m)|`` over the unit balls of ``l_{p_i}^n``.
Lower bounds come from block-coordinate ascent (each block solved exactly by
l_p / l_{p*} duality) and always carry the feasible witness that attains
them.  Upper bounds are elementary majorants.  Exact values are available
when every block but one has finitely many extreme points (``p`` in
``{1, inf}``), and for bilinear ``l_2 x l_2`` (largest singular value).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from hlineq import kernels
from hlineq.tensor import CoefficientTensor, as_float_exponent, make_rng

__all__ = [
    "AscentConfig",
    "AscentResult",
    "NormBracket",
    "OracleResult",
    "BudgetExceeded",
    "conjugate",
    "lp_norm",
    "block_dual_maximizer",
    "contract_except",
    "ascend",
    "canonical_order",
    "upper_certificate",
    "brute_force_norm",
    "exact_norm",
    "bracket",
]

_EPS = np.finfo(float).eps


class BudgetExceeded(RuntimeError):
    """The requested exact/grid oracle would exceed its enumeration budget."""


@dataclass(frozen=True)
class AscentConfig:
    restarts: int = 16
    max_sweeps: int = 500
    rel_tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if self.max_sweeps < 0:
            raise ValueError("max_sweeps must be >= 0")


@dataclass(frozen=True)
class AscentResult:
    value: float
    witness: tuple
    sweeps: int
    converged: bool
    history: tuple = ()


@dataclass(frozen=True)
class NormBracket:
    lower: float
    upper: float
    witness: tuple = field(default=(), repr=False)
    sweeps: int = 0
    restarts: int = 0
    converged: bool = True

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise ValueError(f"invalid bracket [{self.lower}, {self.upper}]")

    def contains(self, value: float, rtol: float = 0.0) -> bool:
        slack = rtol * max(abs(value), 1.0)
        return self.lower - slack <= value <= self.upper + slack


@dataclass(frozen=True)
class OracleResult:
    """``value`` is attained by a feasible point; ``upper`` bounds the norm.

    For exact oracles ``value == upper``; for grid oracles ``upper`` is the
    mesh bound ``value / (1 - (m-1) * delta)``.
    """

    value: float
    upper: float
    exact: bool
    method: str
    mesh: float = 0.0


def conjugate(p: float) -> float:
    if p < 1:
        raise ValueError(f"conjugate needs p >= 1, got {p}")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def lp_norm(v, p: float) -> float:
    a = np.abs(np.asarray(v, dtype=np.float64))
    if a.size == 0:
        return 0.0
    s = a.max()
    if s == 0 or math.isinf(p):
        return float(s)
    return float(s * math.fsum((a / s) ** p) ** (1.0 / p))


def _sign(c):
    return np.where(c >= 0, 1.0, -1.0)


def block_dual_maximizer(c, p) -> tuple[np.ndarray, float]:
    """Unit vector of ``l_p^n`` maximizing ``sum c_j x_j``, and the max ``||c||_{p*}``.

    ``sign(0) = +1``; for ``p = 1`` ties go to the smallest index.  A zero
    ``c`` returns ``(e_1, 0)``.
    """
    c = np.asarray(c, dtype=np.float64)
    p = as_float_exponent(p)
    if p < 1:
        raise ValueError("block solves need p >= 1")
    n = c.shape[0]
    scale = np.abs(c).max() if n else 0.0
    if scale == 0:
        x = np.zeros(n)
        x[0] = 1.0
        return x, 0.0
    ps = conjugate(p)
    if math.isinf(p):
        return _sign(c), float(math.fsum(np.abs(c)))
    if p == 1:
        j = int(np.argmax(np.abs(c)))
        x = np.zeros(n)
        x[j] = _sign(c[j])
        return x, float(abs(c[j]))
    u = np.abs(c) / scale
    w = u ** (ps - 1.0)
    x = _sign(c) * w / lp_norm(w, p)
    return x, lp_norm(c, ps)


def contract_except(coeffs: np.ndarray, xs: Sequence[np.ndarray], b: int) -> np.ndarray:
    """Vector ``T(x^1, .., ., .., x^m)`` with block ``b`` left open."""
    arr = np.moveaxis(coeffs, b, 0)
    for axis in reversed(range(len(xs))):
        if axis != b:
            arr = arr @ xs[axis]
    return arr


def _domain(t: CoefficientTensor, domain) -> list[float]:
    ps = [as_float_exponent(p) for p in domain]
    if len(ps) != t.m:
        raise ValueError(f"domain has {len(ps)} entries for an arity-{t.m} tensor")
    if any(p < 1 for p in ps):
        raise ValueError("domain exponents must be >= 1")
    return ps


def _normalize(u: np.ndarray, p: float) -> np.ndarray:
    return u / lp_norm(u, p)


def _initial_point(n: int, ps: list[float], restart: int, rng) -> list[np.ndarray]:
    if restart == 0:
        return [_normalize(np.ones(n), p) for p in ps]
    out = []
    for p in ps:
        u = rng.standard_normal(n)
        out.append(_normalize(u if np.any(u) else np.ones(n), p))
    return out


def _axis_signature(coeffs: np.ndarray, axis: int, p: float):
    # fsum is exactly rounded, so the signature does not depend on axis order
    moved = np.moveaxis(coeffs, axis, 0).reshape(coeffs.shape[0], -1)
    return (p, tuple(sorted(math.fsum(row * row) for row in moved)))


def canonical_order(t: CoefficientTensor, ps: Sequence[float]) -> list[int]:
    """Axis order used internally by the ascent.

    Sorting axes by an order-free signature makes the ascent run on the same
    array whatever the caller's axis order, so brackets are invariant under
    simultaneous permutation of axes and domain.
    """
    sigs = [_axis_signature(t.coeffs, i, ps[i]) for i in range(t.m)]
    return sorted(range(t.m), key=lambda i: sigs[i])


def _run(coeffs, ps, xs, cfg: AscentConfig):
    m = len(ps)
    value = abs(float(contract_except(coeffs, xs, 0) @ xs[0]))
    history = [value]
    converged = cfg.max_sweeps == 0
    sweeps = 0
    for sweeps in range(1, cfg.max_sweeps + 1):
        prev = value
        for b in range(m):
            c = contract_except(coeffs, xs, b)
            xs[b], value = block_dual_maximizer(c, ps[b])
        history.append(value)
        # each block solve can only raise the value; allow rounding noise
        assert value >= prev * (1.0 - 1e-12) - 1e-300, (prev, value)
        if value - prev <= cfg.rel_tol * value:
            converged = True
            break
    return value, xs, sweeps, converged, history


def ascend(t: CoefficientTensor, domain, cfg: AscentConfig = AscentConfig()) -> AscentResult:
    """Best feasible value over ``cfg.restarts`` block-coordinate ascents."""
    ps = _domain(t, domain)
    order = canonical_order(t, ps)
    coeffs = np.ascontiguousarray(np.transpose(t.coeffs, order))
    cps = [ps[i] for i in order]
    rng = make_rng(cfg.seed)
    best = None
    total_sweeps = 0
    for r in range(cfg.restarts):
        xs = _initial_point(t.n, cps, r, rng)
        value, xs, sweeps, conv, hist = _run(coeffs, cps, xs, cfg)
        total_sweeps += sweeps
        if best is None or value > best[0]:
            best = (value, list(xs), conv, hist)
    value, cxs, conv, hist = best
    xs = [None] * t.m
    for pos, axis in enumerate(order):
        xs[axis] = cxs[pos]
    exact_value = t(*xs)
    if exact_value < 0:
        xs[0] = -xs[0]
    return AscentResult(abs(exact_value), tuple(xs), total_sweeps, conv, tuple(hist))


def upper_certificate(t: CoefficientTensor, domain) -> float:
    """``min(sum |c|, ||c||_F * prod n^{max(0, 1/2 - 1/p_i)})``, rounded outward."""
    ps = _domain(t, domain)
    a = np.abs(t.coeffs.ravel())
    entry = math.fsum(a)
    if entry == 0:
        return 0.0
    inflation = math.prod(t.n ** max(0.0, 0.5 - 1.0 / p) for p in ps)
    frob = lp_norm(a, 2.0) * inflation
    return float(min(entry, frob) * (1.0 + 16 * t.m * _EPS))


# --- oracles -------------------------------------------------------------------


def _enumerate_exact(arr: np.ndarray, ps: list[float]) -> float:
    """Exact norm when ``ps[:-1]`` are all in {1, inf}; last block by duality."""
    if arr.ndim == 1:
        return lp_norm(arr, conjugate(ps[0]))
    p0 = ps[0]
    if p0 == 1:
        return max(_enumerate_exact(arr[j], ps[1:]) for j in range(arr.shape[0]))
    if arr.ndim == 2:
        q = conjugate(ps[1])
        _, mask = kernels.sign_enum(np.ascontiguousarray(arr), q)
        signs = np.array([-1.0 if mask >> i & 1 else 1.0 for i in range(arr.shape[0])])
        # one correctly rounded evaluation, whatever the kernel's summation order
        return lp_norm(signs @ arr, q)
    n = arr.shape[0]
    best = 0.0
    for tail in itertools.product((1.0, -1.0), repeat=n - 1):
        x = np.array((1.0,) + tail)
        best = max(best, _enumerate_exact(np.tensordot(x, arr, axes=1), ps[1:]))
    return best


def _exact_plan(t: CoefficientTensor, ps: list[float]):
    free = [i for i, p in enumerate(ps) if not (p == 1 or math.isinf(p))]
    if len(free) > 1:
        return None
    last = free[0] if free else t.m - 1
    ones = [i for i in range(t.m) if i != last and ps[i] == 1]
    sups = [i for i in range(t.m) if i != last and math.isinf(ps[i])]
    order = ones + sups + [last]
    bits = len(sups) * (t.n - 1) + len(ones) * math.log2(t.n)
    return order, bits


# about 1e5 to 1e6 evaluations per call
_DEFAULT_RESOLUTION = {(2, 2): 20000, (2, 3): 120, (3, 2): 300, (3, 3): 6}


def _sphere_grid(n: int, p: float, resolution: int) -> tuple[np.ndarray, float]:
    """Normalized cube-surface lattice and its l_p covering radius."""
    ticks = np.linspace(-1.0, 1.0, 2 * resolution + 1)
    pts = []
    for axis in range(n):
        for sgn in (1.0, -1.0):
            rest = np.array(list(itertools.product(ticks, repeat=n - 1))).reshape(-1, n - 1)
            face = np.insert(rest, axis, sgn, axis=1)
            pts.append(face)
    pts = np.unique(np.round(np.concatenate(pts), 12), axis=0)
    # x and -x give the same |T|: keep one of each pair
    first = pts[np.arange(len(pts)), np.argmax(pts != 0, axis=1)]
    pts = pts[first > 0]
    norms = _row_dual(pts, p)
    delta = (n - 1) ** (0.0 if math.isinf(p) else 1.0 / p) / resolution
    return pts / norms[:, None], delta


def brute_force_norm(
    t: CoefficientTensor,
    domain,
    resolution: Optional[int] = None,
    budget_bits: float = 26,
    max_points: int = 4_000_000,
) -> OracleResult:
    """Independent oracle for the operator norm.

    Exact extreme-point enumeration when at most one block has
    ``p`` outside ``{1, inf}`` (that block is solved by duality); otherwise a
    grid over the unit spheres of the first ``m-1`` blocks (``n <= 3``,
    ``m <= 3``) with the exact dual solve on the last one.
    """
    ps = _domain(t, domain)
    if t.n == 1:
        value = abs(float(t.coeffs.ravel()[0]))
        return OracleResult(value, value, True, "scalar")
    plan = _exact_plan(t, ps)
    if plan is not None:
        order, bits = plan
        if bits > budget_bits:
            raise BudgetExceeded(f"{bits:.1f} enumeration bits > budget {budget_bits}")
        arr = np.transpose(t.coeffs, order)
        value = _enumerate_exact(arr, [ps[i] for i in order])
        return OracleResult(value, value, True, "enumeration")
    if t.n > 3 or t.m > 3:
        raise BudgetExceeded("grid oracle needs n <= 3 and m <= 3")
    if resolution is None:
        resolution = _DEFAULT_RESOLUTION[(t.m, t.n)]
    grids = [_sphere_grid(t.n, p, resolution) for p in ps[:-1]]
    count = math.prod(len(g) for g, _ in grids)
    if count > max_points:
        raise BudgetExceeded(f"{count} grid points > {max_points}")
    q_last = conjugate(ps[-1])
    coeffs = t.coeffs
    if t.m == 2:
        vals = _row_dual(grids[0][0] @ coeffs, q_last)
    else:
        mats = np.einsum("ai,ijk->ajk", grids[0][0], coeffs)
        vals = np.concatenate([_row_dual(grids[1][0] @ mat, q_last) for mat in mats])
    value = float(vals.max())
    delta = max(d for _, d in grids)
    shrink = 1.0 - (t.m - 1) * delta
    upper = value / shrink * (1.0 + 1e-12) if shrink > 0 else math.inf
    return OracleResult(value, upper, False, "grid", delta)


def _row_dual(rows: np.ndarray, q: float) -> np.ndarray:
    a = np.abs(rows)
    if math.isinf(q):
        return a.max(axis=1)
    if q == 1:
        return a.sum(axis=1)
    return (a**q).sum(axis=1) ** (1.0 / q)


def exact_norm(t: CoefficientTensor, domain, budget_bits: float = 26) -> Optional[float]:
    """Exact norm when a method exists within budget, else ``None``."""
    ps = _domain(t, domain)
    if t.m == 2 and ps == [2.0, 2.0]:
        return float(np.linalg.norm(t.coeffs, 2))
    plan = _exact_plan(t, ps)
    if plan is None or plan[1] > budget_bits:
        return None
    return brute_force_norm(t, ps, budget_bits=budget_bits).value


def bracket(t: CoefficientTensor, domain, cfg: AscentConfig = AscentConfig()) -> NormBracket:
    """Ascent lower bound with witness, elementary upper certificate."""
    res = ascend(t, domain, cfg)
    upper = upper_certificate(t, domain)
    lower = res.value
    if lower > upper:
        raise ArithmeticError(f"ascent value {lower} exceeds certificate {upper}")
    return NormBracket(lower, upper, res.witness, res.sweeps, cfg.restarts, res.converged)
