import math

import pytest

from hlineq.admissibility import InequalityInstance
from hlineq.experiments import (
    GrowthFit,
    InstanceRejected,
    RatioSample,
    fit_growth,
    ksz_scaling_check,
    make_witness,
    refute_instance,
    sample_seed,
    sup_sharpness_probe,
    verify_instance,
)
from hlineq.norms import bracket


class TestFit:
    def test_exact_line(self):
        ns = [2, 3, 5, 8, 13, 21]
        fit = fit_growth(ns, [3.7 * n**0.8125 for n in ns])
        assert fit.slope == pytest.approx(0.8125, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log(3.7), abs=1e-12)
        assert fit.residual < 1e-12

    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            fit_growth([2, 4], [1.0, 2.0])
        with pytest.raises(ValueError):
            GrowthFit(((0.0, 0.0),), 1.0, 0.0, 0.0)

    def test_sample_invariant(self):
        with pytest.raises(ValueError):
            RatioSample(2, "x", 0, 1.0, 1.0, 2.0, "bracket", 0.5, 1.0)


class TestWitnesses:
    @pytest.mark.parametrize("dom", [["2", "2"], ["3", "3"], ["inf", "4"], ["4/3", "3/2"]])
    def test_diagonal_norm_is_consistent(self, dom):
        for n in (2, 3, 5):
            w = make_witness("diagonal", 2, n, 0, dom)
            b = bracket(w.tensor, dom)
            assert b.lower <= w.norm * (1 + 1e-9) <= b.upper * (1 + 1e-9)
            # flat or basis vectors attain the analytic value
            assert b.lower == pytest.approx(w.norm, rel=1e-9)

    def test_lifted_diagonal(self):
        w = make_witness("diagonal:1", 3, 4, 0, ["3", "3", "3"])
        assert w.norm == pytest.approx(4 ** (1 / 3), rel=1e-15)
        assert w.tensor.coeffs[0, 2, 2] == 1.0 and w.tensor.coeffs[1, 2, 2] == 0.0

    def test_littlewood_needs_power_of_two(self):
        with pytest.raises(ValueError):
            make_witness("littlewood", 2, 6, 0, ["inf", "inf"])

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            make_witness("nope", 2, 2, 0, ["2", "2"])

    def test_seed_derivation_is_stable(self):
        assert sample_seed(0, 4, 1) == sample_seed(0, 4, 1)
        assert len({sample_seed(0, n, i) for n in range(2, 10) for i in range(10)}) == 80


class TestVerify:
    def test_littlewood_ratio(self):
        rep = verify_instance(InequalityInstance(["inf", "inf"], ["4/3", "4/3"]), [2], source="littlewood")
        assert rep.max_ratio == pytest.approx(math.sqrt(2), abs=1e-12)
        assert rep.passed is True and rep.bound_used == "lower"

    def test_t1_constant_one(self):
        # ||A|| >= l_2 norm of any row or column for l_4 x l_4, so the ratio stays near 1
        rep = verify_instance(InequalityInstance(["4", "4"], ["2", "2"]), [2, 4, 8], source="gaussian",
                              samples=6, constant=1.0)
        assert rep.passed

    def test_rejects_inadmissible(self):
        with pytest.raises(InstanceRejected):
            verify_instance(InequalityInstance(["2", "2"], ["2", "2"]), [2])

    def test_unknown_needs_exploratory(self):
        inst = InequalityInstance(["3/2", "inf"], ["4", "2"])
        with pytest.raises(InstanceRejected):
            verify_instance(inst, [2])
        rep = verify_instance(inst, [2, 3], samples=2, exploratory=True)
        assert rep.exploratory and rep.passed is None

    def test_ratio_uses_lower_bound(self):
        rep = verify_instance(InequalityInstance(["3", "3", "3"], ["inf", "3", "12/5"]), [3], samples=3)
        for s in rep.samples:
            assert s.ratio_sound_upper == s.lhs / s.norm_lower


class TestRefute:
    def test_diagonal_slope(self):
        rep = refute_instance(InequalityInstance(["2", "2"], ["2", "2"]), [2, 4, 8, 16, 32, 64])
        assert rep.fit.slope == pytest.approx(0.5, abs=1e-12)
        assert rep.n_dependent and rep.tolerance == 0.05

    def test_lifted_diagonal_slope(self):
        rep = refute_instance(InequalityInstance(["3", "3", "3"], ["inf", "5/2", "12/5"]),
                              [2, 4, 8, 16, 32], witness="diagonal:1")
        assert rep.fit.slope == pytest.approx(2 / 5 - 1 / 3, abs=1e-12)
        assert rep.n_dependent

    def test_rejects_admissible(self):
        with pytest.raises(InstanceRejected):
            refute_instance(InequalityInstance(["inf", "inf"], ["4/3", "4/3"]), [2, 4, 8])

    def test_ratio_uses_upper_bound(self):
        rep = refute_instance(InequalityInstance(["inf", "inf"], ["1", "1"]), [2, 3, 4],
                              witness="rademacher", samples=2)
        for s in rep.samples:
            assert s.norm_method == "exact"
            assert s.ratio_sound_lower == s.lhs / s.norm_upper


class TestKsz:
    def test_predicted(self):
        rep = ksz_scaling_check(2, ["inf", "inf"], [2, 3, 4, 5], samples=3)
        assert rep.predicted == 1.5 and set(rep.methods) == {"exact"}

    def test_spectral_slope(self):
        # largest singular value of an n x n sign matrix grows like 2 sqrt(n)
        rep = ksz_scaling_check(2, ["2", "2"], [4, 8, 16, 32, 64], samples=6)
        assert rep.predicted == 0.5
        assert abs(rep.fit.slope - 0.5) < 0.15

    def test_trilinear_all_inf(self):
        rep = ksz_scaling_check(3, ["inf"] * 3, [2, 3, 4, 5, 6], samples=4)
        assert rep.predicted == 2.0
        assert abs(rep.fit.slope - 2.0) <= 0.3

    def test_precondition(self):
        with pytest.raises(ValueError):
            ksz_scaling_check(2, ["3/2", "inf"], [2, 3, 4])

    def test_reproducible(self):
        a = ksz_scaling_check(2, ["inf", "inf"], [2, 3, 4], samples=3, seed=5)
        b = ksz_scaling_check(2, ["inf", "inf"], [2, 3, 4], samples=3, seed=5, workers=3)
        assert a.to_dict() == b.to_dict()


class TestProbe:
    def test_trilinear(self):
        rep = sup_sharpness_probe(3, ["3"] * 3, [2, 3], ["3", "12/5"], "10", [2, 4, 8, 16])
        assert rep.fit.slope == pytest.approx(0.1, abs=1e-12)

    def test_bilinear(self):
        rep = sup_sharpness_probe(2, ["2", "2"], [2], ["2"], "2", [2, 4, 8, 16])
        assert rep.fit.slope == pytest.approx(0.5, abs=1e-12)

    def test_control(self):
        rep = sup_sharpness_probe(3, ["3"] * 3, [2, 3], ["3", "12/5"], "inf", [2, 4, 8])
        assert rep.fit.slope == pytest.approx(0.0, abs=1e-12)

    def test_two_sups(self):
        # S = {3}; both other axes satisfy 1/p_3 + 1/p_j >= 1
        rep = sup_sharpness_probe(3, ["2", "2", "2"], [3], ["2"], "4", [2, 4, 8], j=2)
        assert rep.fit.slope == pytest.approx(0.25, abs=1e-12)

    def test_hypothesis_checked(self):
        with pytest.raises(ValueError):
            sup_sharpness_probe(3, ["4"] * 3, [2, 3], ["3", "3"], "10", [2, 4, 8])
