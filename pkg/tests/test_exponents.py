from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hlineq.exponents import (
    INF,
    Criticality,
    ExtendedExponent,
    ar_exponents,
    ar_screening,
    complement,
    critical_exponents,
    critical_lower_bounds,
    criticality_class,
    domain_tuple,
    dsp_exponent,
    harmonic_sum,
    parse_exponents,
    pp_exponent,
    strict_ceil,
    supercritical_k,
    tail_delta,
    uniform_supercritical_exponent,
)

E = ExtendedExponent


def fractions(lo=1, hi=40):
    return st.builds(Fraction, st.integers(lo, 200 * hi), st.integers(1, 200)).filter(lambda f: f >= lo)


exponents = st.one_of(st.just(INF), fractions(1).map(E))


class TestLiterals:
    @pytest.mark.parametrize("text,recip", [("inf", 0), ("∞", 0), ("3", Fraction(1, 3)),
                                            ("12/5", Fraction(5, 12)), (" 4 / 3 ", Fraction(3, 4))])
    def test_parse(self, text, recip):
        assert E(text).reciprocal == recip

    @pytest.mark.parametrize("bad", ["2.5", "1e3", "-2", "0", "a/b", "3/0", "", "inf/2"])
    def test_rejects(self, bad):
        with pytest.raises((ValueError, ZeroDivisionError)):
            E(bad)

    def test_rejects_finite_float(self):
        with pytest.raises((TypeError, ValueError)):
            E(2.5)

    def test_math_inf_is_accepted(self):
        import math

        assert E(math.inf) == INF

    def test_str_roundtrip(self):
        for q in ["inf", "3", "12/5", "4/3"]:
            assert str(E(q)) == q
            assert E(str(E(q))) == E(q)

    def test_list(self):
        assert parse_exponents("inf,3,12/5") == (INF, E(3), E(Fraction(12, 5)))


class TestOrdering:
    def test_inf_is_largest(self):
        assert E(10**9) < INF
        assert INF == E("inf")
        assert max(E(2), INF, E(3)) == INF

    @given(exponents, exponents)
    def test_order_matches_reciprocals(self, a, b):
        assert (a <= b) == (a.reciprocal >= b.reciprocal)

    @given(exponents)
    def test_conjugate_is_involution(self, a):
        if a.reciprocal > 0:
            assert a.conjugate().conjugate() == a
            assert a.reciprocal + a.conjugate().reciprocal == 1

    def test_conjugate_endpoints(self):
        assert E(1).conjugate() == INF
        assert INF.conjugate() == E(1)
        assert E(2).conjugate() == E(2)


class TestFormulas:
    def test_critical_exponents_m3(self):
        assert critical_exponents(3) == (INF, E(3), E(Fraction(12, 5)))

    def test_critical_exponents_m4(self):
        # q_k = 2m(m-1)/(mk-2k+2) = 24/(2k+2)
        assert critical_exponents(4) == (INF, E(4), E(3), E(Fraction(12, 5)))

    def test_critical_exponents_m2(self):
        assert critical_exponents(2) == (INF, E(2))

    def test_critical_lower_bounds(self):
        assert critical_lower_bounds(3) == (E(3), E(Fraction(3, 2)))
        with pytest.raises(ValueError):
            critical_lower_bounds(2)

    def test_critical_exponents_dominate_lower_bounds(self):
        for m in range(3, 9):
            crit = critical_exponents(m)[1:]
            for q, lb in zip(crit, critical_lower_bounds(m)):
                assert q >= lb

    def test_pp_exponent(self):
        assert pp_exponent(["inf", "inf"]) == E(Fraction(4, 3))
        # all-inf m-linear: 2m/(m+1)
        for m in range(1, 7):
            assert pp_exponent(["inf"] * m) == E(Fraction(2 * m, m + 1))
        with pytest.raises(ValueError):
            pp_exponent([3, 3])

    def test_dsp_exponent(self):
        assert dsp_exponent([4, 4]) == E(2)
        assert dsp_exponent([3, 3, "inf"]) == E(3)
        with pytest.raises(ValueError):
            dsp_exponent([2, 2])

    def test_harmonic_and_class(self):
        assert harmonic_sum([3, 3, 3]) == 1
        assert harmonic_sum([2, 4, 8], [2, 3]) == Fraction(3, 8)
        assert criticality_class([3, 3, 3]) is Criticality.CRITICAL
        assert criticality_class([2, 2, 2]) is Criticality.SUPERCRITICAL
        assert criticality_class(["inf", 4]) is Criticality.SUBCRITICAL

    def test_tail_delta(self):
        assert tail_delta([2, 4, 4], 2) == E(2)
        assert tail_delta([2, 4, 4], 3) == E(Fraction(4, 3))
        with pytest.raises(ValueError):
            tail_delta([2, 4, 4], 1)

    def test_strict_ceiling(self):
        assert strict_ceil(Fraction(0)) == 1
        assert strict_ceil(Fraction(1)) == 2
        assert strict_ceil(Fraction(1, 2)) == 1
        assert strict_ceil(Fraction(-1, 2)) == 0

    def test_supercritical(self):
        # m - p = 0 -> one supremum under the strict ceiling
        assert supercritical_k(3, 3) == 1
        assert supercritical_k(3, 6) == 0
        assert supercritical_k(4, 2) == 3
        assert uniform_supercritical_exponent(3, 3) == E(Fraction(3, 1))
        with pytest.raises(ValueError):
            supercritical_k(3, 7)
        with pytest.raises(ValueError):
            supercritical_k(3, 1)

    def test_ar_exponents(self):
        assert ar_exponents([3, 3, 3], 1) == (INF, E(3), E(Fraction(12, 5)))
        # k = 0, p = (4, 4): 1/q_1 = 1/2 + 2/4 - 1/2, 1/q_2 = 1/2 + 1/4 - 1/4
        assert ar_exponents([4, 4], 0) == (E(2), E(2))

    def test_ar_hypotheses_checked(self):
        with pytest.raises(ValueError):
            ar_exponents([2, 2, 8, 8], 2)
        raw = ar_exponents([2, 2, 8, 8], 2, check=False)
        assert raw == (INF, INF, E(Fraction(4, 3)), E(Fraction(8, 5)))
        scr = ar_screening([2, 2, 8, 8], 2, raw)
        # both entries sit in [4/3, 2] but 3/4 + 5/8 = 11/8 exceeds 3/2 - 1/4
        assert scr.outside == ()
        assert (scr.reciprocal_sum, scr.budget) == (Fraction(11, 8), Fraction(5, 4))
        assert not scr.within_budget and not scr.clean

    def test_screening_critical_is_outside_range(self):
        # tail 2/3 > 1/2 puts delta = 3 above 2: the interval is empty
        scr = ar_screening([3, 3, 3], 1, ar_exponents([3, 3, 3], 1))
        assert scr.outside == (2, 3)
        assert scr.within_budget

    def test_screening_clean(self):
        scr = ar_screening([2, 2, 4, 4], 2, ["inf", "inf", 2, 2])
        assert scr.clean


class TestSets:
    def test_domain_tuple_rejects_below_one(self):
        with pytest.raises(ValueError):
            domain_tuple(["1/2", 3])

    def test_complement(self):
        assert complement({2, 3}, 3) == frozenset({1})
        with pytest.raises(ValueError):
            complement({4}, 3)
