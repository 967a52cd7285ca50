"""Desk-scale experiments: constant checks on admissible tuples, growth fits on
inadmissible ones.

Direction of soundness is fixed by construction.  A verification divides by
a *lower* bound on ``||T||`` (so the reported ratio can only overestimate the
true one); a refutation divides by an *upper* bound or an exact value (so a
positive growth rate is real).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from hlineq.admissibility import InequalityInstance, Outcome, Verdict, admissibility
from hlineq.exponents import INF, ExtendedExponent, as_exponent, complement, domain_tuple
from hlineq.norms import AscentConfig, bracket, exact_norm
from hlineq.tensor import (
    CoefficientTensor,
    as_float_exponent,
    diagonal_form,
    lift,
    littlewood_power,
    mixed_norm,
    random_gaussian,
    random_unimodular,
)

__all__ = [
    "RatioSample",
    "GrowthFit",
    "VerifyReport",
    "RefuteReport",
    "KszReport",
    "ProbeReport",
    "InstanceRejected",
    "WITNESS_FAMILIES",
    "make_witness",
    "sample_seed",
    "fit_growth",
    "verify_instance",
    "refute_instance",
    "ksz_scaling_check",
    "sup_sharpness_probe",
]

EXACT_SLOPE_TOL = 0.05
BRACKET_SLOPE_TOL = 0.3


class InstanceRejected(ValueError):
    """The instance's verdict does not allow the requested experiment."""

    def __init__(self, message: str, verdict: Verdict):
        super().__init__(message)
        self.verdict = verdict


@dataclass(frozen=True)
class RatioSample:
    n: int
    source: str
    seed: int
    lhs: float
    norm_lower: float
    norm_upper: float
    norm_method: str
    ratio_sound_upper: float
    ratio_sound_lower: float

    def __post_init__(self):
        if not self.ratio_sound_lower <= self.ratio_sound_upper:
            raise ValueError("ratio_sound_lower exceeds ratio_sound_upper")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GrowthFit:
    points: tuple
    slope: float
    intercept: float
    residual: float

    def __post_init__(self):
        if len(self.points) < 3:
            raise ValueError("a growth fit needs at least 3 points")
        if not math.isfinite(self.slope):
            raise ValueError("slope is not finite")

    def to_dict(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
        }


def fit_growth(ns: Sequence[float], values: Sequence[float]) -> GrowthFit:
    """Least-squares line through ``(log n, log value)``; ``residual`` is the RMS error."""
    pts = [(math.log(n), math.log(v)) for n, v in zip(ns, values) if v > 0]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 usable points, got {len(pts)}")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    a = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = float(np.sqrt(np.mean((a @ np.array([slope, intercept]) - y) ** 2)))
    return GrowthFit(tuple(pts), float(slope), float(intercept), resid)


# --- witness families ----------------------------------------------------------


def _diag_norm(n: int, ps: Sequence[float]) -> float:
    # Hoelder: sum_j prod_i x^i_j <= n^{max(0, 1 - sum 1/p_i)} on the unit balls,
    # attained at flat vectors (or at e_1 when the sum exceeds 1)
    s = math.fsum(0.0 if math.isinf(p) else 1.0 / p for p in ps)
    return float(n ** max(0.0, 1.0 - s))


@dataclass(frozen=True)
class Witness:
    tensor: CoefficientTensor
    norm: Optional[float]  # known exact norm, if any
    deterministic: bool


def _diag_witness(m, n, seed, ps, k=0):
    if k >= m:
        raise ValueError("lift depth must leave at least one axis")
    base = diagonal_form(m - k, n)
    t = lift(base, k) if k else base
    return Witness(t, _diag_norm(n, ps[k:]), True)


def _littlewood_witness(m, n, seed, ps):
    k = n.bit_length() - 1
    if m != 2 or n < 2 or 1 << k != n:
        raise ValueError("littlewood witnesses are bilinear with n a power of two")
    return Witness(littlewood_power(2, k), None, True)


WITNESS_FAMILIES: dict[str, Callable] = {
    "diagonal": _diag_witness,
    "littlewood": _littlewood_witness,
    "rademacher": lambda m, n, seed, ps: Witness(random_unimodular(m, n, seed), None, False),
    "gaussian": lambda m, n, seed, ps: Witness(random_gaussian(m, n, seed), None, False),
}


def make_witness(family: str, m: int, n: int, seed: int, domain) -> Witness:
    """Build a witness; ``diagonal:k`` is the diagonal on the last ``m-k`` axes lifted by ``k``."""
    ps = [as_float_exponent(p) for p in domain]
    name, _, arg = family.partition(":")
    if name not in WITNESS_FAMILIES:
        raise ValueError(f"unknown witness family {family!r}")
    if arg:
        if name != "diagonal":
            raise ValueError(f"family {name!r} takes no parameter")
        return _diag_witness(m, n, seed, ps, int(arg))
    return WITNESS_FAMILIES[name](m, n, seed, ps)


def sample_seed(seed: int, n: int, index: int) -> int:
    """Per-sample seed derived from the run seed, ``n`` and the sample index."""
    return int(np.random.SeedSequence([seed, n, index]).generate_state(1, dtype=np.uint32)[0])


def _families(spec) -> list[str]:
    return [spec] if isinstance(spec, str) else list(spec)


# --- samples -------------------------------------------------------------------


def _norm_bounds(w: Witness, domain, cfg: AscentConfig):
    if w.norm is not None:
        return w.norm, w.norm, "analytic"
    exact = exact_norm(w.tensor, domain)
    if exact is not None:
        return exact, exact, "exact"
    b = bracket(w.tensor, domain, cfg)
    return b.lower, b.upper, "bracket"


def _sample(task) -> RatioSample:
    family, m, n, seed, domain, spec, cfg = task
    w = make_witness(family, m, n, seed, domain)
    lhs = mixed_norm(w.tensor, spec)
    lo, hi, method = _norm_bounds(w, domain, cfg)
    upper_ratio = lhs / lo if lo > 0 else (math.inf if lhs > 0 else 0.0)
    lower_ratio = lhs / hi if hi > 0 else upper_ratio
    return RatioSample(n, family, seed, lhs, lo, hi, method, upper_ratio, lower_ratio)


def _run_tasks(tasks: list, workers: int) -> list[RatioSample]:
    # map() keeps submission order, which is sorted by (n, family, seed)
    if workers <= 1:
        return [_sample(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sample, tasks))


def _tasks(families, m, n_list, samples, seed, domain, spec, cfg):
    tasks = []
    for n in sorted(n_list):
        for fam in families:
            det = fam.partition(":")[0] in ("diagonal", "littlewood")
            for i in range(1 if det else samples):
                tasks.append((fam, m, n, sample_seed(seed, n, i), domain, spec, cfg))
    return tasks


# --- reports -------------------------------------------------------------------


@dataclass(frozen=True)
class VerifyReport:
    verdict: Verdict
    samples: tuple
    max_ratio: float
    constant: Optional[float]
    tolerance: float
    passed: Optional[bool]
    exploratory: bool = False
    bound_used: str = "lower"

    def to_dict(self) -> dict:
        return {
            "kind": "verify",
            "verdict": self.verdict.to_dict(),
            "max_ratio": self.max_ratio,
            "constant": self.constant,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "exploratory": self.exploratory,
            "bound_used": self.bound_used,
            "samples": [s.to_dict() for s in self.samples],
        }


@dataclass(frozen=True)
class RefuteReport:
    verdict: Verdict
    samples: tuple
    fit: GrowthFit
    tolerance: float
    n_dependent: bool
    exploratory: bool = False
    bound_used: str = "upper"

    def to_dict(self) -> dict:
        return {
            "kind": "refute",
            "verdict": self.verdict.to_dict(),
            "fit": self.fit.to_dict(),
            "tolerance": self.tolerance,
            "n_dependent": self.n_dependent,
            "exploratory": self.exploratory,
            "bound_used": self.bound_used,
            "samples": [s.to_dict() for s in self.samples],
        }


def verify_instance(
    instance: InequalityInstance,
    n_list: Sequence[int],
    source="rademacher",
    samples: int = 8,
    seed: int = 0,
    cfg: AscentConfig = AscentConfig(),
    tolerance: float = 0.05,
    exploratory: bool = False,
    workers: int = 1,
    constant: Optional[float] = None,
) -> VerifyReport:
    """Maximum of ``lhs / ||T||_lower`` over sampled tensors, checked against a constant.

    The constant is the verdict's unless ``constant`` is given (useful for
    rules that bound the constant without the verdict carrying it).
    """
    verdict = admissibility(instance)
    if verdict.outcome is Outcome.INADMISSIBLE:
        raise InstanceRejected("instance is provably inadmissible", verdict)
    if verdict.outcome is Outcome.UNKNOWN and not exploratory:
        raise InstanceRejected("instance is not provably admissible (use exploratory mode)", verdict)
    tasks = _tasks(_families(source), instance.m, n_list, samples, seed,
                   instance.domain, instance.exponents, cfg)
    rows = _run_tasks(tasks, workers)
    max_ratio = max(r.ratio_sound_upper for r in rows)
    const = constant
    if const is None and verdict.constant_log2 is not None:
        const = verdict.constant
    passed = None if const is None else max_ratio <= const * (1.0 + tolerance)
    return VerifyReport(verdict, tuple(rows), max_ratio, const, tolerance, passed,
                        verdict.outcome is not Outcome.ADMISSIBLE)


def _fit_max(rows: list[RatioSample], attr: str) -> GrowthFit:
    best: dict[int, float] = {}
    for r in rows:
        best[r.n] = max(best.get(r.n, 0.0), getattr(r, attr))
    ns = sorted(best)
    return fit_growth(ns, [best[n] for n in ns])


def refute_instance(
    instance: InequalityInstance,
    n_list: Sequence[int],
    witness="diagonal",
    samples: int = 4,
    seed: int = 0,
    cfg: AscentConfig = AscentConfig(),
    exploratory: bool = False,
    workers: int = 1,
) -> RefuteReport:
    """Fit the growth of ``max lhs / ||T||_upper`` per ``n``; a positive slope shows ``C`` depends on ``n``."""
    verdict = admissibility(instance)
    if verdict.outcome is Outcome.ADMISSIBLE:
        raise InstanceRejected("instance is provably admissible", verdict)
    if verdict.outcome is Outcome.UNKNOWN and not exploratory:
        raise InstanceRejected("instance is not provably inadmissible (use exploratory mode)", verdict)
    tasks = _tasks(_families(witness), instance.m, n_list, samples, seed,
                   instance.domain, instance.exponents, cfg)
    rows = _run_tasks(tasks, workers)
    fit = _fit_max(rows, "ratio_sound_lower")
    all_exact = all(r.norm_method != "bracket" for r in rows)
    tol = EXACT_SLOPE_TOL if all_exact else BRACKET_SLOPE_TOL
    return RefuteReport(verdict, tuple(rows), fit, tol, fit.slope > tol,
                        verdict.outcome is Outcome.UNKNOWN)


@dataclass(frozen=True)
class KszReport:
    m: int
    domain: tuple
    predicted: float
    fit: GrowthFit
    means: tuple
    methods: tuple
    seeds: tuple

    def to_dict(self) -> dict:
        return {
            "kind": "ksz",
            "m": self.m,
            "domain": [str(p) for p in self.domain],
            "predicted": self.predicted,
            "fit": self.fit.to_dict(),
            "means": [list(x) for x in self.means],
            "methods": list(self.methods),
            "seeds": [list(x) for x in self.seeds],
        }


def ksz_prediction(m: int, domain) -> float:
    ps = domain_tuple(domain)
    return (m + 1) / 2 - float(sum(p.reciprocal for p in ps))


def _ksz_norm(task):
    m, n, s, domain, cfg = task
    t = random_unimodular(m, n, s)
    exact = exact_norm(t, domain)
    if exact is not None:
        return exact, "exact"
    return bracket(t, domain, cfg).lower, "ascent"


def ksz_scaling_check(
    m: int,
    domain,
    n_list: Sequence[int],
    samples: int = 20,
    seed: int = 0,
    cfg: AscentConfig = AscentConfig(),
    workers: int = 1,
) -> KszReport:
    """Growth of the mean norm of random +-1 forms against ``(m+1)/2 - sum 1/p_i``."""
    ps = domain_tuple(domain)
    if len(ps) != m:
        raise ValueError("domain arity does not match m")
    if any(p < 2 for p in ps):
        raise ValueError("the scaling law needs every p_i >= 2")
    tasks = [(m, n, sample_seed(seed, n, i), ps, cfg) for n in sorted(n_list) for i in range(samples)]
    if workers <= 1:
        out = [_ksz_norm(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_ksz_norm, tasks))
    means, methods, seeds = [], [], []
    for j, n in enumerate(sorted(n_list)):
        chunk = out[j * samples : (j + 1) * samples]
        means.append((n, math.fsum(v for v, _ in chunk) / samples))
        methods.append("exact" if all(k == "exact" for _, k in chunk) else "ascent")
        seeds.append((n, *(t[2] for t in tasks[j * samples : (j + 1) * samples])))
    fit = fit_growth([n for n, _ in means], [v for _, v in means])
    return KszReport(m, ps, ksz_prediction(m, ps), fit, tuple(means), tuple(methods), tuple(seeds))


@dataclass(frozen=True)
class ProbeReport:
    replaced_axis: int
    r: ExtendedExponent
    spec: tuple
    fit: GrowthFit
    expected_slope: float

    def to_dict(self) -> dict:
        return {
            "kind": "probe",
            "replaced_axis": self.replaced_axis,
            "r": str(self.r),
            "spec": [str(q) for q in self.spec],
            "fit": self.fit.to_dict(),
            "expected_slope": self.expected_slope,
        }


def sup_sharpness_probe(m: int, domain, s, inner, r, n_list: Sequence[int], j: Optional[int] = None) -> ProbeReport:
    """Replace the sup over axis ``j`` (1-based, default: first axis outside ``s``) by an ``l_r`` sum.

    The left side is ``l_r`` over axis ``j``, then sup over the other axes
    outside ``s``, then the nested ``inner`` norm over ``s`` in increasing
    order.  The witness is the diagonal on ``s`` and ``j`` (other axes fixed
    at the first basis vector); its norm is 1 under the sharpness hypothesis
    and its left side is ``n^{1/r}``.
    """
    ps = domain_tuple(domain)
    if len(ps) != m:
        raise ValueError("domain arity does not match m")
    sset = sorted(set(s))
    if not sset or any(not 1 <= i <= m for i in sset):
        raise ValueError("s must be a non-empty subset of 1..m")
    rest = sorted(complement(sset, m))
    if not rest:
        raise ValueError("s must leave at least one axis for the sup")
    inner = [as_exponent(q) for q in inner]
    if len(inner) != len(sset):
        raise ValueError("inner spec must have one exponent per index in s")
    recip = lambda idx: sum(ps[i - 1].reciprocal for i in idx)
    if recip(sset) >= 1 or any(recip(sset + [i]) < 1 for i in rest):
        raise ValueError("sharpness hypothesis fails for this s and domain")
    j = rest[0] if j is None else j
    if j not in rest:
        raise ValueError("the replaced axis must lie outside s")
    r = as_exponent(r)
    others = [i for i in rest if i != j]
    order = [j] + others + sset  # 1-based axes, outermost first
    spec = (r,) + (INF,) * len(others) + tuple(inner)
    perm_ps = [ps[i - 1] for i in order]
    values = []
    for n in sorted(n_list):
        # diagonal on positions {0} + s-block; other sup axes fixed at index 0
        w = _diag_witness(m - len(others), n, 0, [float(p) for p in [perm_ps[0]] + perm_ps[1 + len(others):]])
        t = w.tensor
        if others:
            c = np.zeros((n,) * m)
            idx = (slice(None),) + (0,) * len(others)
            c[idx] = t.coeffs
            t = CoefficientTensor(c)
        values.append(mixed_norm(t, spec) / w.norm)
    fit = fit_growth(sorted(n_list), values)
    return ProbeReport(j, r, spec, fit, 0.0 if r.is_inf else float(r.reciprocal))
