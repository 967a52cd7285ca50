"""Three-valued admissibility oracle for mixed-norm Hardy--Littlewood inequalities.

An instance ``(p, q)`` asks whether

    ( sum_{j_1} ( ... ( sum_{j_m} |T(e_{j_1},...,e_{j_m})|^{q_m} )^{q_{m-1}/q_m} ... )^{q_1/q_2} )^{1/q_1} <= C ||T||

holds for every m-linear form on ``l_{p_1}^n x ... x l_{p_m}^n`` with ``C``
independent of ``n``.  Every rule is an exact statement over rationals.  The
rules are tried in a fixed order (most specific first) and the first one
that decides wins, so citations are deterministic.  ``all_verdicts`` runs
every rule and is what the consistency tests sweep.

Mixed norms only decrease when an exponent grows, so admissibility is
closed upwards and inadmissibility downwards.  Several rules use this to
extend a theorem's hypothesis range to dominated/dominating tuples.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

from hlineq.exponents import (
    ExponentLike,
    ExtendedExponent,
    INF,
    domain_tuple,
    parse_exponents,
    strict_ceil,
)

__all__ = [
    "Outcome",
    "Verdict",
    "InequalityInstance",
    "RULES",
    "admissibility",
    "all_verdicts",
    "GridCell",
    "rational_range",
    "region_grid",
]

HALF = Fraction(1, 2)
ZERO = Fraction(0)
ONE = Fraction(1)


class Outcome(enum.Enum):
    ADMISSIBLE = "admissible"
    INADMISSIBLE = "inadmissible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """Outcome plus the rule that decided it.

    ``constant_log2`` encodes a prescribed constant ``C = 2**constant_log2``;
    every constant that appears (1, sqrt 2, 2^((m-2)/2), ...) is a power of
    two, so it stays exact.
    """

    outcome: Outcome
    rule: Optional[str] = None
    reason: str = ""
    constant_log2: Optional[Fraction] = None

    def __post_init__(self):
        if self.outcome is Outcome.UNKNOWN and self.rule is not None:
            raise ValueError("an unknown verdict cites no rule")
        if self.outcome is not Outcome.UNKNOWN and not self.rule:
            raise ValueError("a decided verdict needs a rule")
        if self.constant_log2 is not None and self.outcome is not Outcome.ADMISSIBLE:
            raise ValueError("only admissible verdicts carry a constant")

    @property
    def constant(self) -> Optional[float]:
        return None if self.constant_log2 is None else 2.0 ** float(self.constant_log2)

    @property
    def constant_expr(self) -> Optional[str]:
        if self.constant_log2 is None:
            return None
        e = self.constant_log2
        return "1" if e == 0 else f"2^({e})"

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "rule": self.rule,
            "reason": self.reason,
            "constant": self.constant,
            "constant_expr": self.constant_expr,
        }


@dataclass(frozen=True)
class InequalityInstance:
    domain: tuple[ExtendedExponent, ...]
    exponents: tuple[ExtendedExponent, ...]
    m: int = field(default=0)

    def __init__(self, domain, exponents, m: Optional[int] = None):
        dom = domain_tuple(domain)
        qs = parse_exponents(exponents)
        if len(qs) != len(dom):
            raise ValueError(f"domain has {len(dom)} entries but exponents have {len(qs)}")
        if m is not None and m != len(dom):
            raise ValueError(f"m = {m} does not match tuple length {len(dom)}")
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "exponents", qs)
        object.__setattr__(self, "m", len(dom))

    def __str__(self):
        p = ",".join(map(str, self.domain))
        q = ",".join(map(str, self.exponents))
        return f"m={self.m} p=({p}) q=({q})"


# --- rule plumbing ---------------------------------------------------------

Recips = tuple  # tuple[Fraction, ...]
Decide = Callable[[Recips], Optional[Verdict]]


@dataclass(frozen=True)
class Rule:
    tag: str
    title: str
    bind: Callable[[Recips], Optional[Decide]]


RULES: list[Rule] = []


def _rule(tag: str, title: str):
    def register(fn):
        RULES.append(Rule(tag, title, fn))
        return fn

    return register


def _yes(tag, reason, c=None):
    return Verdict(Outcome.ADMISSIBLE, tag, reason, None if c is None else Fraction(c))


def _no(tag, reason):
    return Verdict(Outcome.INADMISSIBLE, tag, reason)


def _fmt(r: Fraction) -> str:
    return str(r)


def _q(r: Fraction) -> str:
    return "inf" if r == 0 else str(1 / r)


def _finite_gt1(r: Fraction) -> bool:
    """Domain exponent in (1, inf)."""
    return ZERO < r < ONE


# --- bilinear and linear rules --------------------------------------------


@_rule("linear", "linear forms: a >= p/(p-1)")
def _linear(pr):
    if len(pr) != 1 or not pr[0] < ONE:
        return None
    bound = ONE - pr[0]

    def decide(qr):
        if qr[0] <= bound:
            return _yes("linear", f"1/q_1 = {_fmt(qr[0])} <= 1 - 1/p_1 = {_fmt(bound)}", 0)
        return _no("linear", f"1/q_1 = {_fmt(qr[0])} > 1 - 1/p_1 = {_fmt(bound)}")

    return decide


@_rule("criticodjair", "critical case p_i = m: sup then q_k = 2m(m-1)/(mk-2k+2)")
def _critical(pr):
    m = len(pr)
    if m < 2 or any(r != Fraction(1, m) for r in pr):
        return None
    formula = [None] + [Fraction(m * k - 2 * k + 2, 2 * m * (m - 1)) for k in range(2, m + 1)]
    const = Fraction(m - 2, 2)

    def decide(qr):
        if qr[0] == 0 and all(qr[k - 1] <= formula[k - 1] for k in range(2, m + 1)):
            return _yes("criticodjair", "q_1 = inf and q_k dominate 2m(m-1)/(mk-2k+2)", const)
        if m > 2:
            for k in range(2, m + 1):
                if qr[k - 1] > Fraction(k - 1, m):
                    return _no("criticodjair", f"q_{k} = {_q(qr[k - 1])} < m/(k-1) = {Fraction(m, k - 1)}")
            if all(r > 0 for r in qr):
                return _no("criticodjair", "q_1 = inf is sharp when the inner exponents are finite")
        return None

    return decide


@_rule("trilinear", "3-linear forms on l_3: q_1 = inf, q_2 >= 3, q_3 >= 3/2, 1/q_2 + 1/q_3 <= 5/6")
def _trilinear(pr):
    third = Fraction(1, 3)
    if pr != (third, third, third):
        return None

    def decide(qr):
        r1, r2, r3 = qr
        if r1 != 0:
            return _no("trilinear", f"q_1 = {_q(r1)} but q_1 = inf is required")
        if r2 > third:
            return _no("trilinear", f"q_2 = {_q(r2)} < 3")
        if r3 > 2 * third:
            return _no("trilinear", f"q_3 = {_q(r3)} < 3/2")
        if r2 + r3 > Fraction(5, 6):
            return _no("trilinear", f"1/q_2 + 1/q_3 = {_fmt(r2 + r3)} > 5/6")
        return _yes("trilinear", f"1/q_2 + 1/q_3 = {_fmt(r2 + r3)} <= 5/6")

    return decide


@_rule("444", "3-linear, 1/q + 1/r < 1 <= 1/p + 1/q + 1/r")
def _prop444(pr):
    if len(pr) != 3:
        return None
    a, b, c = pr  # p, q, r in the usual naming
    if not (_finite_gt1(a) and _finite_gt1(c) and b <= HALF):
        return None
    inner = b + c
    if not (inner < 1 and a + inner >= 1):
        return None
    d2, d3, budget = ONE - inner, ONE - c, Fraction(3, 2) - inner

    def decide(qr):
        r1, r2, r3 = qr
        if r1 != 0:
            return _no("444", f"q_1 = {_q(r1)} but q_1 = inf is required")
        if r2 > d2:
            return _no("444", f"1/q_2 = {_fmt(r2)} > 1 - (1/r + 1/q) = {_fmt(d2)}")
        if r3 > d3:
            return _no("444", f"1/q_3 = {_fmt(r3)} > 1 - 1/r = {_fmt(d3)}")
        if r2 + r3 > budget:
            return _no("444", f"1/q_2 + 1/q_3 = {_fmt(r2 + r3)} > {_fmt(budget)}")
        return _yes("444", f"1/q_2 + 1/q_3 = {_fmt(r2 + r3)} <= {_fmt(budget)}")

    return decide


@_rule("pqmaior1", "bilinear, 1/p + 1/q >= 1: b = inf and a >= q/(q-1)")
def _pqmaior1(pr):
    if len(pr) != 2 or not (pr[0] < 1 and pr[1] < 1) or sum(pr) < 1:
        return None
    bound = ONE - pr[1]

    def decide(qr):
        if qr[0] != 0:
            return _no("pqmaior1", f"b = q_1 = {_q(qr[0])} but b = inf is required")
        if qr[1] > bound:
            return _no("pqmaior1", f"a = q_2 = {_q(qr[1])} < q/(q-1) = {_q(bound)}")
        return _yes("pqmaior1", "b = inf and a >= q/(q-1)", 0)

    return decide


@_rule("77", "Littlewood anisotropic: 1/a + 1/b <= 3/2 on l_inf x l_inf, constant sqrt 2")
def _littlewood(pr):
    if pr != (ZERO, ZERO):
        return None

    def decide(qr):
        if max(qr) > 1:
            return None  # a or b below 1: outside the stated range
        s = qr[0] + qr[1]
        if s <= Fraction(3, 2):
            return _yes("77", f"1/a + 1/b = {_fmt(s)} <= 3/2", HALF)
        return _no("77", f"1/a + 1/b = {_fmt(s)} > 3/2")

    return decide


def _bilinear_region(tag, pr, const=None):
    total = pr[0] + pr[1]
    d_in, d_out, budget = ONE - pr[1], ONE - total, Fraction(3, 2) - total

    def decide(qr):
        rb, ra = qr
        if ra > d_in:
            return _no(tag, f"a = q_2 = {_q(ra)} < q/(q-1) = {_q(d_in)}")
        if rb > d_out:
            return _no(tag, f"b = q_1 = {_q(rb)} < 1/(1 - (1/p + 1/q)) = {_q(d_out)}")
        if ra + rb > budget:
            return _no(tag, f"1/a + 1/b = {_fmt(ra + rb)} > 3/2 - (1/p + 1/q) = {_fmt(budget)}")
        return _yes(tag, "a >= q/(q-1), b >= 1/(1-(1/p+1/q)), 1/a + 1/b <= 3/2 - (1/p+1/q)", const)

    return decide


@_rule("t1", "bilinear 1 < q <= 2 < p: optimal constant 1")
def _t1(pr):
    if len(pr) != 2:
        return None
    rp, rq = pr
    if not (rp < HALF and HALF <= rq < ONE and rp + rq < 1):
        return None
    return _bilinear_region("t1", pr, 0)


@_rule("psstbil", "bilinear p, q in [2, inf]")
def _psstbil(pr):
    if len(pr) != 2 or max(pr) > HALF or sum(pr) >= 1:
        return None
    return _bilinear_region("psstbil", pr)


@_rule("azx", "bilinear q in (1, inf], p in [2, inf], 1/p + 1/q < 1")
def _azx(pr):
    if len(pr) != 2:
        return None
    rp, rq = pr
    if not (rp <= HALF and rq < ONE and rp + rq < 1):
        return None
    return _bilinear_region("azx", pr)


# --- super-critical anisotropic rules -------------------------------------


def _split_ok_low_high(pr, k):
    """p_1..p_k in [1, 2] and p_{k+1}..p_m in [2, inf], tail sum <= 1/2."""
    return all(r >= HALF for r in pr[:k]) and all(r <= HALF for r in pr[k:]) and sum(pr[k:]) <= HALF


@_rule("t5", "sups over p_1..p_k in [1,2] when the tail sits on the abps boundary")
def _t5(pr):
    m = len(pr)
    ks = [k for k in range(1, m) if _split_ok_low_high(pr, k)]
    if not ks:
        return None

    def decide(qr):
        for k in ks:
            tail_p = sum(pr[k:])
            budget = Fraction(m - k + 1, 2) - tail_p
            tq = qr[k:]
            if all(HALF <= r <= ONE - tail_p for r in tq) and sum(tq) == budget:
                if all(r == 0 for r in qr[:k]):
                    return _yes("t5", f"q_1..q_{k} = inf with tail on the boundary {_fmt(budget)}")
                return _no("t5", f"q_1..q_{k} must all be inf")
        return None

    return decide


@_rule("t4", "sups over p_1..p_k in [1,2], abps budget on the tail")
def _t4(pr):
    m = len(pr)
    ks = []
    for k in range(1, m):
        if _split_ok_low_high(pr, k):
            tail_p = sum(pr[k:])
            if all(pr[j] + tail_p >= 1 for j in range(k)):
                ks.append(k)
    if not ks:
        return None

    def decide(qr):
        for k in ks:
            tail_p = sum(pr[k:])
            lo, hi = HALF, ONE - tail_p
            budget = Fraction(m - k + 1, 2) - tail_p
            tq = qr[k:]
            prefix_inf = all(r == 0 for r in qr[:k])
            if all(lo <= r <= hi for r in tq):
                if not prefix_inf:
                    return _no("t4", f"q_1..q_{k} must all be inf")
                if sum(tq) > budget:
                    return _no("t4", f"tail reciprocal sum {_fmt(sum(tq))} > {_fmt(budget)}")
                return _yes("t4", f"tail reciprocal sum {_fmt(sum(tq))} <= {_fmt(budget)}")
            if prefix_inf and all(r <= hi for r in tq) and sum(max(r, lo) for r in tq) <= budget:
                return _yes("t4", "tail dominates an admissible tuple inside [delta, 2]")
        return None

    return decide


def _supercritical_split(pr, k):
    """Tail sum < 1 and every leading 1/p_j tips it to >= 1."""
    tail_p = sum(pr[k:])
    if tail_p >= 1:
        return False
    return all(pr[j] + tail_p >= 1 for j in range(k))


@_rule("48", "super-critical anisotropic exponents with k sups, constant 2^((m-k-1)/2)")
def _eq48(pr):
    m = len(pr)
    binds = []
    for k in range(1, m):
        tail = pr[k:]
        lim = Fraction(1, 2 * (m - k))
        if not all(lim <= r < ONE for r in tail):  # p in (1, 2(m-k)]
            continue
        if not _supercritical_split(pr, k):
            continue
        tails = [sum(pr[i:]) for i in range(m)]
        formula = [HALF + Fraction(m - i, 2 * (m - k)) - tails[i] for i in range(m)]
        binds.append((k, tails, formula))
    if not binds:
        return None

    def decide(qr):
        for k, tails, formula in binds:
            for i in range(k, m):
                if qr[i] > ONE - tails[i]:
                    return _no("48", f"q_{i + 1} = {_q(qr[i])} < 1/(1 - tail) = {_q(ONE - tails[i])}")
            for j in range(k):
                if qr[j] != 0:
                    return _no("48", f"q_{j + 1} = {_q(qr[j])} but q_1..q_{k} must be inf")
            tail_p = tails[k]
            budget = Fraction(m - k + 1, 2) - tail_p
            if all(r <= HALF for r in pr[k:]) and sum(qr[k:]) > budget:
                return _no("48", f"tail reciprocal sum {_fmt(sum(qr[k:]))} > {_fmt(budget)}")
            if all(qr[i] <= formula[i] for i in range(k, m)):
                return _yes("48", f"q_{k + 1}..q_m dominate the k={k} exponents", Fraction(m - k - 1, 2))
        return None

    return decide


@_rule("aron-supercritical", "k sups then q_i >= 1/(1 - (1/p_i + ... + 1/p_m))")
def _aron_super(pr):
    m = len(pr)
    binds = []
    for k in range(1, m):
        mid, last = pr[k:m - 1], pr[m - 1]
        if not (all(r < HALF for r in mid) and HALF <= last < ONE):
            continue
        if not _supercritical_split(pr, k):
            continue
        binds.append((k, [sum(pr[i:]) for i in range(m)]))
    if not binds:
        return None

    def decide(qr):
        k, tails = binds[0]
        for j in range(k):
            if qr[j] != 0:
                return _no("aron-supercritical", f"q_{j + 1} = {_q(qr[j])} but q_1..q_{k} must be inf")
        for i in range(k, m):
            if qr[i] > ONE - tails[i]:
                return _no("aron-supercritical", f"q_{i + 1} = {_q(qr[i])} < {_q(ONE - tails[i])}")
        return _yes("aron-supercritical", f"q_1..q_{k} = inf and tail exponents dominate the deltas")

    return decide


@_rule("dimantgeral", "uniform p in (1, 2m]: k = max(0, ceil(m - p)) sups then flat q >= p/(p-(m-k))")
def _dimantgeral(pr):
    m = len(pr)
    if m < 2 or len(set(pr)) != 1:
        return None
    r = pr[0]
    if not (Fraction(1, 2 * m) <= r < ONE):
        return None
    p = 1 / r
    k = max(0, strict_ceil(m - p))
    thr = ONE - (m - k) * r  # reciprocal of p/(p-(m-k))

    def decide(qr):
        head, tail = qr[:k], qr[k:]
        flat = len(set(tail)) == 1 and tail[0] > 0
        if all(x == 0 for x in head) and all(x <= thr for x in tail):
            return _yes("dimantgeral", f"k={k} sups and tail exponents >= {_q(thr)}")
        if flat and tail[0] > thr:
            return _no("dimantgeral", f"flat tail exponent {_q(tail[0])} < {_q(thr)}")
        if flat and any(x != 0 for x in head):
            return _no("dimantgeral", f"the {k} leading sups cannot be improved")
        return None

    return decide


# --- sub-critical m-linear rules ------------------------------------------


@_rule("aron", "1 < p_m <= 2 < p_1..p_{m-1}: q_i >= delta_i")
def _aron(pr):
    m = len(pr)
    if m < 2 or not (all(r < HALF for r in pr[:-1]) and HALF <= pr[-1] < ONE) or sum(pr) >= 1:
        return None
    tails = [sum(pr[i:]) for i in range(m)]

    def decide(qr):
        for i in range(m):
            if qr[i] > ONE - tails[i]:
                return _no("aron", f"q_{i + 1} = {_q(qr[i])} < delta = {_q(ONE - tails[i])}")
        return _yes("aron", "q_i >= delta_i for every i")

    return decide


@_rule("abps", "sum 1/p_i <= 1/2, q_i in [delta, 2]: sum 1/q_i <= (m+1)/2 - sum 1/p_i")
def _abps(pr):
    m = len(pr)
    total = sum(pr)
    if total > HALF:
        return None
    lo, hi = HALF, ONE - total
    budget = Fraction(m + 1, 2) - total

    def decide(qr):
        s = sum(qr)
        if all(lo <= r <= hi for r in qr):
            if s <= budget:
                return _yes("abps", f"sum 1/q_i = {_fmt(s)} <= {_fmt(budget)}")
            return _no("abps", f"sum 1/q_i = {_fmt(s)} > {_fmt(budget)}")
        if all(r <= hi for r in qr) and sum(max(r, lo) for r in qr) <= budget:
            return _yes("abps", "dominates an admissible tuple inside [delta, 2]")
        return None

    return decide


@_rule("teo111", "p_i in [1, 2m], sum 1/p_i < 1: anisotropic exponents")
def _teo111(pr):
    m = len(pr)
    if sum(pr) >= 1 or any(r < Fraction(1, 2 * m) for r in pr):
        return None
    formula = [HALF + Fraction(m - i, 2 * m) - sum(pr[i:]) for i in range(m)]

    def decide(qr):
        if all(qr[i] <= formula[i] for i in range(m)):
            return _yes("teo111", "exponents dominate the anisotropic tuple")
        return None

    return decide


def _flat_rule(tag, pr, recip):
    def decide(qr):
        if all(r <= recip for r in qr):
            return _yes(tag, f"every q_i >= {_q(recip)}")
        if len(set(qr)) == 1 and qr[0] > recip:
            return _no(tag, f"flat exponent {_q(qr[0])} < sharp {_q(recip)}")
        return None

    return decide


@_rule("bv", "sum 1/p_i <= 1/2: flat exponent 2m/(m + 1 - 2 sum 1/p_i)")
def _bv(pr):
    m, total = len(pr), sum(pr)
    if total > HALF:
        return None
    return _flat_rule("bv", pr, (m + 1 - 2 * total) / (2 * m))


@_rule("bvf", "1/2 <= sum 1/p_i < 1: flat exponent 1/(1 - sum 1/p_i)")
def _bvf(pr):
    total = sum(pr)
    if not HALF <= total < 1:
        return None
    return _flat_rule("bvf", pr, ONE - total)


@_rule("3w", "sum 1/p_i >= 1 forces the flat exponent to be inf")
def _three_w(pr):
    if sum(pr) < 1:
        return None

    def decide(qr):
        if len(set(qr)) == 1 and qr[0] > 0:
            return _no("3w", f"flat exponent {_q(qr[0])} is finite but sum 1/p_i >= 1")
        return None

    return decide


# --- structural rules: sup extension, restriction, witnesses ---------------


@_rule("t2", "leading sups extend an admissible inequality on the remaining axes")
def _sup_extension(pr):
    if len(pr) < 2:
        return None

    def decide(qr):
        if qr[0] != 0:
            return None
        sub = _evaluate(pr[1:], qr[1:])
        if sub.outcome is Outcome.ADMISSIBLE:
            return Verdict(
                Outcome.ADMISSIBLE,
                "t2",
                f"sup over axis 1 extends axes 2..{len(pr)} [{sub.rule}: {sub.reason}]",
                sub.constant_log2,
            )
        return None

    return decide


@_rule("t0", "restriction: a valid inequality restricts to any subset of axes")
def _restriction(pr):
    m = len(pr)
    if m < 2:
        return None

    def decide(qr):
        for drop in range(m - 1, -1, -1):
            keep = [i for i in range(m) if i != drop]
            sub = _evaluate(tuple(pr[i] for i in keep), tuple(qr[i] for i in keep))
            if sub.outcome is Outcome.INADMISSIBLE:
                axes = ",".join(str(i + 1) for i in keep)
                return _no("t0", f"restriction to axes ({axes}) fails [{sub.rule}: {sub.reason}]")
        return None

    return decide


@_rule("diagonal", "diagonal witness: outermost exponent >= 1/(1 - sum 1/p_i), inf if the sum is >= 1")
def _diagonal(pr):
    total = sum(pr)
    bound = max(ZERO, ONE - total)

    def decide(qr):
        if qr[0] > bound:
            return _no("diagonal", f"q_1 = {_q(qr[0])} but the diagonal form needs q_1 >= {_q(bound)}")
        return None

    return decide


@_rule("ksz", "random unimodular forms: sum 1/q_i <= (m+1)/2 - sum 1/p_i when every p_i >= 2")
def _ksz(pr):
    if any(r > HALF for r in pr):
        return None
    budget = Fraction(len(pr) + 1, 2) - sum(pr)

    def decide(qr):
        if sum(qr) > budget:
            return _no("ksz", f"sum 1/q_i = {_fmt(sum(qr))} > {_fmt(budget)}")
        return None

    return decide


# --- dispatch --------------------------------------------------------------


@lru_cache(maxsize=4096)
def _bound_rules(pr: Recips) -> tuple[tuple[str, Decide], ...]:
    out = []
    for rule in RULES:
        decide = rule.bind(pr)
        if decide is not None:
            out.append((rule.tag, decide))
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def _evaluate(pr: Recips, qr: Recips) -> Verdict:
    for _, decide in _bound_rules(pr):
        v = decide(qr)
        if v is not None:
            return v
    return Verdict(Outcome.UNKNOWN, None, "no rule applies")


def _recips(instance: InequalityInstance) -> tuple[Recips, Recips]:
    return (
        tuple(e.reciprocal for e in instance.domain),
        tuple(e.reciprocal for e in instance.exponents),
    )


def admissibility(instance: InequalityInstance) -> Verdict:
    """First decisive rule in the fixed order, or ``Unknown``."""
    return _evaluate(*_recips(instance))


def all_verdicts(instance: InequalityInstance) -> list[Verdict]:
    """Every decisive rule's verdict, in rule order."""
    pr, qr = _recips(instance)
    out = []
    for _, decide in _bound_rules(pr):
        v = decide(qr)
        if v is not None:
            out.append(v)
    return out


# --- grids -----------------------------------------------------------------


@dataclass(frozen=True)
class GridCell:
    x: ExtendedExponent
    y: ExtendedExponent
    verdict: Verdict


def rational_range(lo: ExponentLike, hi: ExponentLike, step: ExponentLike) -> list[ExtendedExponent]:
    """Exact grid ``lo, lo + step, ..., <= hi``."""
    lo_v = ExtendedExponent(lo).value
    hi_v = ExtendedExponent(hi).value
    st = ExtendedExponent(step).value
    n = int((hi_v - lo_v) / st)
    return [ExtendedExponent(lo_v + i * st) for i in range(n + 1)]


def region_grid(
    domain: Sequence[ExponentLike],
    template: Sequence[Optional[ExponentLike]],
    axes: tuple[int, int],
    xs: Iterable[ExponentLike],
    ys: Iterable[ExponentLike],
) -> list[GridCell]:
    """Verdicts over a 2-D slice of exponent space.

    ``template`` fixes every exponent except the two 1-based ``axes``
    (whose template entries are ignored and may be ``None``).
    """
    dom = domain_tuple(domain)
    m = len(dom)
    if len(template) != m:
        raise ValueError("template length must equal m")
    a, b = axes
    if a == b or not (1 <= a <= m and 1 <= b <= m):
        raise ValueError(f"bad axes {axes} for m = {m}")
    for i, t in enumerate(template):
        if t is None and (i + 1) not in (a, b):
            raise ValueError(f"template entry {i + 1} is missing")
    base = [None if (i + 1) in (a, b) else ExtendedExponent(t) for i, t in enumerate(template)]
    xs = [ExtendedExponent(x) for x in xs]
    ys = [ExtendedExponent(y) for y in ys]
    cells = []
    for x, y in itertools.product(xs, ys):
        q = list(base)
        q[a - 1], q[b - 1] = x, y
        cells.append(GridCell(x, y, admissibility(InequalityInstance(dom, q))))
    return cells
