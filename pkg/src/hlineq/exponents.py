"""Exact exponent arithmetic.

Exponents live in ``(0, inf]`` and are stored by their reciprocal, which is
an exact :class:`fractions.Fraction` (``1/inf == 0``).  Working in reciprocal
space keeps every admissibility comparison exact and lets ``inf`` take part
in sums without special cases.

Positions inside domain/exponent tuples and index sets are 1-based, matching
the usual way the inequalities are written (``q_1`` is the outermost sum).
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence, Union

__all__ = [
    "ExtendedExponent",
    "INF",
    "ExponentLike",
    "Criticality",
    "as_exponent",
    "parse_exponents",
    "domain_tuple",
    "index_set",
    "complement",
    "harmonic_sum",
    "criticality_class",
    "dsp_exponent",
    "pp_exponent",
    "critical_exponents",
    "critical_lower_bounds",
    "tail_delta",
    "strict_ceil",
    "supercritical_k",
    "uniform_supercritical_exponent",
    "ar_exponents",
    "ar_screening",
    "ArScreening",
]

_LITERAL = re.compile(r"^\s*([+]?\d+)\s*(?:/\s*(\d+)\s*)?$")


@total_ordering
class ExtendedExponent:
    """A positive rational number or infinity.

    Construct from ints, Fractions, ``"inf"``/``"∞"``, ``"a/b"`` literals or
    ``math.inf``.  Finite floats and decimal literals are refused: boundary
    cases must be classified exactly.
    """

    __slots__ = ("_recip",)

    def __init__(self, value: "ExponentLike"):
        if isinstance(value, ExtendedExponent):
            self._recip = value._recip
            return
        if isinstance(value, str):
            text = value.strip().lower()
            if text in ("inf", "infinity", "∞", "+inf"):
                self._recip = Fraction(0)
                return
            match = _LITERAL.match(text)
            if match is None:
                raise ValueError(f"not an exponent literal: {value!r} (use 'inf' or 'a/b')")
            num, den = int(match.group(1)), int(match.group(2) or 1)
            if den == 0:
                raise ValueError(f"zero denominator in {value!r}")
            value = Fraction(num, den)
        elif isinstance(value, float):
            if value == math.inf:
                self._recip = Fraction(0)
                return
            raise TypeError("finite floats are not accepted as exponents; use Fraction or 'a/b'")
        elif isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            value = Fraction(value)
        else:
            raise TypeError(f"cannot build an exponent from {type(value).__name__}")
        if value <= 0:
            raise ValueError(f"exponents must be positive, got {value}")
        self._recip = 1 / value

    @classmethod
    def from_reciprocal(cls, recip: Union[Fraction, int]) -> "ExtendedExponent":
        recip = Fraction(recip)
        if recip < 0:
            raise ValueError("reciprocal must be non-negative")
        obj = cls.__new__(cls)
        obj._recip = recip
        return obj

    @property
    def reciprocal(self) -> Fraction:
        return self._recip

    @property
    def is_inf(self) -> bool:
        return self._recip == 0

    @property
    def value(self) -> Fraction:
        if self.is_inf:
            raise ValueError("infinite exponent has no rational value")
        return 1 / self._recip

    def conjugate(self) -> "ExtendedExponent":
        """Hölder conjugate ``p/(p-1)``; defined for ``p >= 1``."""
        if self._recip > 1:
            raise ValueError(f"conjugate undefined for exponent {self} < 1")
        return ExtendedExponent.from_reciprocal(1 - self._recip)

    def __float__(self) -> float:
        return math.inf if self.is_inf else float(1 / self._recip)

    def __eq__(self, other):
        try:
            other = as_exponent(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._recip == other._recip

    def __lt__(self, other):
        try:
            other = as_exponent(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._recip > other._recip

    def __hash__(self):
        return hash(("ExtendedExponent", self._recip))

    def __str__(self):
        if self.is_inf:
            return "inf"
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

    def __repr__(self):
        return f"ExtendedExponent('{self}')"


ExponentLike = Union[ExtendedExponent, Fraction, int, str, float]
INF = ExtendedExponent("inf")


def as_exponent(x: ExponentLike) -> ExtendedExponent:
    return x if isinstance(x, ExtendedExponent) else ExtendedExponent(x)


def parse_exponents(text: Union[str, Iterable[ExponentLike]]) -> tuple[ExtendedExponent, ...]:
    """Parse ``"inf,3,12/5"`` (or any iterable of exponent-likes) into a tuple."""
    if isinstance(text, str):
        parts = [s for s in text.split(",") if s.strip()]
        if not parts:
            raise ValueError("empty exponent list")
        return tuple(ExtendedExponent(s) for s in parts)
    return tuple(as_exponent(x) for x in text)


def domain_tuple(p: Union[str, Iterable[ExponentLike]]) -> tuple[ExtendedExponent, ...]:
    """Validated domain tuple: non-empty, every entry ``>= 1``."""
    dom = parse_exponents(p)
    if not dom:
        raise ValueError("domain tuple must be non-empty")
    for e in dom:
        if e.reciprocal > 1:
            raise ValueError(f"domain exponents must be >= 1, got {e}")
    return dom


def index_set(s: Iterable[int], m: int) -> frozenset[int]:
    out = frozenset(int(i) for i in s)
    if any(i < 1 or i > m for i in out):
        raise ValueError(f"index set {sorted(out)} not inside 1..{m}")
    return out


def complement(s: Iterable[int], m: int) -> frozenset[int]:
    return frozenset(range(1, m + 1)) - index_set(s, m)


def harmonic_sum(domain: Sequence[ExponentLike], s: Iterable[int] | None = None) -> Fraction:
    """Exact ``sum_{i in S} 1/p_i``; ``S`` defaults to every position."""
    dom = parse_exponents(domain)
    idx = range(1, len(dom) + 1) if s is None else index_set(s, len(dom))
    return sum((dom[i - 1].reciprocal for i in idx), Fraction(0))


class Criticality(enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


def criticality_class(domain: Sequence[ExponentLike]) -> Criticality:
    total = harmonic_sum(domain)
    if total < 1:
        return Criticality.SUBCRITICAL
    if total == 1:
        return Criticality.CRITICAL
    return Criticality.SUPERCRITICAL


def dsp_exponent(domain: Sequence[ExponentLike]) -> ExtendedExponent:
    """``1/(1 - sum 1/p_i)``, the flat exponent for ``sum 1/p_i < 1``."""
    total = harmonic_sum(domain)
    if total >= 1:
        raise ValueError(f"sum of reciprocals {total} >= 1: flat exponent is infinite")
    return ExtendedExponent.from_reciprocal(1 - total)


def pp_exponent(domain: Sequence[ExponentLike]) -> ExtendedExponent:
    """``2m/(m + 1 - 2 sum 1/p_i)``, valid for ``sum 1/p_i <= 1/2``."""
    dom = parse_exponents(domain)
    total = harmonic_sum(dom)
    if total > Fraction(1, 2):
        raise ValueError(f"sum of reciprocals {total} > 1/2")
    m = len(dom)
    return ExtendedExponent.from_reciprocal((m + 1 - 2 * total) / (2 * m))


def critical_exponents(m: int) -> tuple[ExtendedExponent, ...]:
    """Exponents ``(inf, q_2, ..., q_m)`` with ``q_k = 2m(m-1)/(mk-2k+2)``."""
    if m < 2:
        raise ValueError("critical exponents need m >= 2")
    out = [INF]
    for k in range(2, m + 1):
        out.append(ExtendedExponent(Fraction(2 * m * (m - 1), m * k - 2 * k + 2)))
    return tuple(out)


def critical_lower_bounds(m: int) -> tuple[ExtendedExponent, ...]:
    """Necessary bounds ``m/(k-1)`` for ``k = 2..m`` (stated for ``m > 2``)."""
    if m < 3:
        raise ValueError("lower bounds are stated for m >= 3")
    return tuple(ExtendedExponent(Fraction(m, k - 1)) for k in range(2, m + 1))


def tail_delta(domain: Sequence[ExponentLike], i: int) -> ExtendedExponent:
    """``1/(1 - sum_{j >= i} 1/p_j)`` for 1-based position ``i``."""
    dom = parse_exponents(domain)
    if not 1 <= i <= len(dom):
        raise ValueError(f"position {i} outside 1..{len(dom)}")
    tail = harmonic_sum(dom, range(i, len(dom) + 1))
    if tail >= 1:
        raise ValueError(f"tail sum {tail} >= 1 from position {i}")
    return ExtendedExponent.from_reciprocal(1 - tail)


def strict_ceil(x: Fraction) -> int:
    """Smallest integer strictly greater than ``x`` (so ``strict_ceil(0) == 1``)."""
    return math.floor(Fraction(x)) + 1


def _check_uniform_p(m: int, p: ExponentLike) -> ExtendedExponent:
    if m < 2:
        raise ValueError("m must be >= 2")
    p = as_exponent(p)
    if p.is_inf or not (1 < p.value <= 2 * m):
        raise ValueError(f"p = {p} outside (1, 2m] = (1, {2 * m}]")
    return p


def supercritical_k(m: int, p: ExponentLike) -> int:
    """Number of leading suprema ``max(0, strict_ceil(m - p))``."""
    p = _check_uniform_p(m, p)
    return max(0, strict_ceil(m - p.value))


def uniform_supercritical_exponent(m: int, p: ExponentLike) -> ExtendedExponent:
    """Sharp flat exponent ``p/(p - (m - k))`` after ``k`` suprema."""
    p = _check_uniform_p(m, p)
    k = supercritical_k(m, p)
    denom = p.value - (m - k)
    if denom <= 0:
        raise ValueError("p <= m - k; exponent undefined")
    return ExtendedExponent(p.value / denom)


def _ar_hypotheses(dom, k: int) -> str | None:
    m = len(dom)
    if k == 0:
        if any(e.is_inf or e.value > 2 * m for e in dom):
            return f"every p_i must lie in [1, {2 * m}]"
        if harmonic_sum(dom) >= 1:
            return "sum of reciprocals must be < 1"
        return None
    if not 1 <= k <= m - 1:
        return f"k must lie in 0..{m - 1}"
    tail = dom[k:]
    if any(e.is_inf or not (1 < e.value <= 2 * (m - k)) for e in tail):
        return f"p_{k + 1}..p_{m} must lie in (1, {2 * (m - k)}]"
    tail_sum = sum((e.reciprocal for e in tail), Fraction(0))
    if tail_sum >= 1:
        return "tail sum of reciprocals must be < 1"
    if any(dom[j].reciprocal + tail_sum < 1 for j in range(k)):
        return "each leading 1/p_j plus the tail sum must be >= 1"
    return None


def ar_exponents(
    domain: Sequence[ExponentLike], k: int = 0, *, check: bool = True
) -> tuple[ExtendedExponent, ...]:
    """Anisotropic exponents with ``k`` leading suprema.

    ``1/q_i = 1/2 + (m-i+1)/(2(m-k)) - sum_{j>=i} 1/p_j`` for ``i > k`` and
    ``q_i = inf`` for ``i <= k``.  With ``check=False`` the hypotheses on the
    domain are skipped and the raw formula values are returned; a
    non-positive reciprocal is refused either way.
    """
    dom = domain_tuple(domain)
    m = len(dom)
    if check:
        problem = _ar_hypotheses(dom, k)
        if problem:
            raise ValueError(f"hypotheses fail for k={k}: {problem}")
    elif not 0 <= k <= m - 1:
        raise ValueError(f"k must lie in 0..{m - 1}")
    out = [INF] * k
    for i in range(k + 1, m + 1):
        tail = sum((dom[j - 1].reciprocal for j in range(i, m + 1)), Fraction(0))
        recip = Fraction(1, 2) + Fraction(m - i + 1, 2 * (m - k)) - tail
        if recip <= 0:
            raise ValueError(f"1/q_{i} = {recip} <= 0")
        out.append(ExtendedExponent.from_reciprocal(recip))
    return tuple(out)


@dataclass(frozen=True)
class ArScreening:
    """Range and budget checks for an anisotropic tuple with ``k`` suprema.

    ``outside`` lists the 1-based positions ``i > k`` with ``q_i`` outside
    ``[delta, 2]``, ``delta = tail_delta(domain, k + 1)``; ``reciprocal_sum``
    is ``sum_{i > k} 1/q_i`` and ``budget`` is ``(m - k + 1)/2 - sum_{i > k} 1/p_i``.
    """

    outside: tuple[int, ...]
    reciprocal_sum: Fraction
    budget: Fraction

    @property
    def within_budget(self) -> bool:
        return self.reciprocal_sum <= self.budget

    @property
    def clean(self) -> bool:
        return not self.outside and self.within_budget


def ar_screening(
    domain: Sequence[ExponentLike], k: int, exponents: Sequence[ExponentLike]
) -> ArScreening:
    """Flag (never reject) exponents outside the range where the sup-split theorems apply."""
    dom = domain_tuple(domain)
    qs = parse_exponents(exponents)
    m = len(dom)
    if len(qs) != m or not 0 <= k <= m - 1:
        raise ValueError("exponents must match the domain and k must lie in 0..m-1")
    tail = harmonic_sum(dom, range(k + 1, m + 1))
    outside = []
    for i in range(k + 1, m + 1):
        r = qs[i - 1].reciprocal
        if tail >= 1 or r > 1 - tail or r < Fraction(1, 2):
            outside.append(i)
    total = sum((q.reciprocal for q in qs[k:]), Fraction(0))
    return ArScreening(tuple(outside), total, Fraction(m - k + 1, 2) - tail)
