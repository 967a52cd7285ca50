import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hlineq.norms import (
    AscentConfig,
    BudgetExceeded,
    NormBracket,
    ascend,
    block_dual_maximizer,
    bracket,
    brute_force_norm,
    contract_except,
    exact_norm,
    lp_norm,
    upper_certificate,
)
from hlineq.tensor import (
    CoefficientTensor,
    diagonal_form,
    lift,
    littlewood_power,
    random_gaussian,
    random_unimodular,
)

domains = st.sampled_from(["1", "3/2", "2", "3", "4", "inf"])


def naive_all_inf(t):
    """Maximum of |T(x^1..x^m)| over all sign vectors, no symmetry reduction."""
    best = 0.0
    for xs in itertools.product(itertools.product((1.0, -1.0), repeat=t.n), repeat=t.m):
        best = max(best, abs(t(*map(np.array, xs))))
    return best


class TestBlockDual:
    def test_examples(self):
        x, v = block_dual_maximizer([2.0, 0.0], "inf")
        assert v == 2.0 and x.tolist() == [1.0, 1.0]
        x, v = block_dual_maximizer([3.0, 4.0], "2")
        assert v == pytest.approx(5.0, rel=1e-15)
        np.testing.assert_allclose(x, [0.6, 0.8], rtol=1e-15)
        x, v = block_dual_maximizer([1.0, 1.0, 1.0], "1")
        assert v == 1.0 and x.tolist() == [1.0, 0.0, 0.0]

    def test_zero(self):
        x, v = block_dual_maximizer(np.zeros(3), "3")
        assert v == 0.0 and x.tolist() == [1.0, 0.0, 0.0]

    def test_rejects_below_one(self):
        with pytest.raises(ValueError):
            block_dual_maximizer([1.0], "1/2")

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=8), domains)
    def test_duality_exact(self, c, p):
        c = np.array(c)
        x, v = block_dual_maximizer(c, p)
        pf = math.inf if p == "inf" else float(Fraction(p))
        ps = 1.0 if math.isinf(pf) else (math.inf if pf == 1 else pf / (pf - 1))
        assert v == pytest.approx(lp_norm(c, ps), rel=1e-14, abs=1e-300)
        assert lp_norm(x, pf) == pytest.approx(1.0, rel=1e-14)
        assert float(c @ x) == pytest.approx(v, rel=1e-12, abs=1e-9)


class TestContract:
    def test_matches_einsum(self):
        t = random_gaussian(3, 4, 0).coeffs
        xs = [np.arange(4.0), np.ones(4), np.array([1.0, -1, 2, 0])]
        np.testing.assert_allclose(contract_except(t, xs, 1), np.einsum("ijk,i,k->j", t, xs[0], xs[2]))


class TestAscent:
    def test_examples(self):
        assert ascend(diagonal_form(2, 3), ["2", "2"]).value == pytest.approx(1.0, abs=1e-9)
        assert ascend(littlewood_power(2, 1), ["inf", "inf"]).value == pytest.approx(2.0, abs=1e-12)

    def test_zero_sweeps_is_initial_point(self):
        t = random_gaussian(2, 3, 1)
        res = ascend(t, ["2", "2"], AscentConfig(restarts=1, max_sweeps=0))
        u = np.ones(3) / math.sqrt(3)
        assert res.value == pytest.approx(abs(t(u, u)), rel=1e-14)

    def test_witness_is_feasible_and_attains(self):
        t = random_gaussian(3, 3, 2)
        dom = ["3", "inf", "3/2"]
        res = ascend(t, dom)
        for x, p in zip(res.witness, [3.0, math.inf, 1.5]):
            assert lp_norm(x, p) <= 1 + 1e-12
        assert t(*res.witness) == pytest.approx(res.value, rel=1e-14)

    def test_history_nondecreasing(self):
        res = ascend(random_gaussian(3, 4, 9), ["3", "3", "3"], AscentConfig(restarts=1))
        h = res.history
        assert all(b >= a * (1 - 1e-12) for a, b in zip(h, h[1:]))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            AscentConfig(restarts=0)
        with pytest.raises(ValueError):
            AscentConfig(rel_tol=0)


class TestCertificate:
    def test_examples(self):
        for n in (2, 3, 7):
            assert upper_certificate(diagonal_form(2, n), ["2", "2"]) == pytest.approx(math.sqrt(n), rel=1e-14)
        assert upper_certificate(littlewood_power(2, 1), ["inf", "inf"]) == pytest.approx(4.0, rel=1e-14)
        assert upper_certificate(CoefficientTensor(np.zeros((2, 2))), ["2", "2"]) == 0.0

    def test_zero_bracket(self):
        b = bracket(CoefficientTensor(np.zeros((3, 3))), ["2", "inf"])
        assert (b.lower, b.upper) == (0.0, 0.0)

    def test_bracket_examples(self):
        b = bracket(diagonal_form(2, 3), ["2", "2"])
        assert b.lower == pytest.approx(1.0, abs=1e-9) and b.upper == pytest.approx(math.sqrt(3), rel=1e-14)
        b = bracket(littlewood_power(2, 1), ["inf", "inf"])
        assert b.lower == pytest.approx(2.0, abs=1e-12) and b.upper == pytest.approx(4.0, rel=1e-14)

    def test_bracket_invariant(self):
        with pytest.raises(ValueError):
            NormBracket(2.0, 1.0)


class TestOracles:
    def test_examples(self):
        assert brute_force_norm(littlewood_power(2, 1), ["inf", "inf"]).value == 2.0
        o = brute_force_norm(diagonal_form(3, 2), ["inf"] * 3)
        assert o.exact and o.value == 2.0

    @pytest.mark.parametrize("seed", range(12))
    def test_enumeration_matches_naive(self, seed):
        m, n = 2 + seed % 2, 2 + seed % 3
        t = random_gaussian(m, n, seed)
        assert brute_force_norm(t, ["inf"] * m).value == pytest.approx(naive_all_inf(t), rel=1e-13)

    def test_mixed_one_inf_exact(self):
        # p = 1 blocks: the maximum sits at a basis vector
        t = random_gaussian(2, 3, 5)
        o = brute_force_norm(t, ["1", "inf"])
        assert o.exact
        assert o.value == pytest.approx(np.abs(t.coeffs).sum(axis=1).max(), rel=1e-14)

    def test_spectral(self):
        t = random_gaussian(2, 5, 1)
        assert exact_norm(t, ["2", "2"]) == pytest.approx(np.linalg.svd(t.coeffs, compute_uv=False)[0], rel=1e-14)

    def test_grid_within_mesh_of_ascent(self):
        t = random_gaussian(2, 2, 3)
        o = brute_force_norm(t, ["3", "3"], resolution=10**4)
        b = bracket(t, ["3", "3"])
        assert not o.exact
        assert o.value <= b.lower * (1 + 1e-12) <= o.upper

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            brute_force_norm(random_unimodular(4, 12, 0), ["inf"] * 4)
        with pytest.raises(BudgetExceeded):
            brute_force_norm(random_gaussian(3, 4, 0), ["2", "3", "3"])
        assert exact_norm(random_gaussian(3, 4, 0), ["2", "3", "3"]) is None


def _random_case(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 4))
    n = int(rng.integers(1, 4))
    dom = [str(rng.choice(["1", "3/2", "2", "3", "inf"])) for _ in range(m)]
    t = random_gaussian(m, n, seed) if seed % 2 else random_unimodular(m, n, seed)
    return t, dom


class TestInvariance:
    @pytest.mark.parametrize("seed", range(40))
    def test_permutation(self, seed):
        t, dom = _random_case(seed)
        b = bracket(t, dom)
        for perm in itertools.permutations(range(t.m)):
            bp = bracket(t.permuted(perm), [dom[i] for i in perm])
            assert bp.lower == pytest.approx(b.lower, rel=1e-12)
            assert bp.upper == pytest.approx(b.upper, rel=1e-12)

    @pytest.mark.parametrize("seed", range(40))
    def test_homogeneity(self, seed):
        t, dom = _random_case(seed)
        lam = [-3.5, 0.25, 7.0, -1.0][seed % 4]
        b, bl = bracket(t, dom), bracket(t.scaled(lam), dom)
        assert bl.lower == pytest.approx(abs(lam) * b.lower, rel=1e-12)
        assert bl.upper == pytest.approx(abs(lam) * b.upper, rel=1e-12)

    @pytest.mark.parametrize("seed", range(20))
    def test_lift_preserves_norm(self, seed):
        m, n = 1 + seed % 2, 2 + seed % 2
        s = random_gaussian(m, n, seed)
        t = lift(s, 1 + seed % 2)
        assert brute_force_norm(t, ["inf"] * t.m).value == brute_force_norm(s, ["inf"] * m).value
        bs, bt = bracket(s, ["2"] * m), bracket(t, ["2"] * t.m)
        assert bt.lower <= bs.upper * (1 + 1e-12) and bs.lower <= bt.upper * (1 + 1e-12)

    @pytest.mark.parametrize("seed", range(30))
    def test_soundness(self, seed):
        t, dom = _random_case(seed)
        b = bracket(t, dom)
        try:
            o = brute_force_norm(t, dom)
        except BudgetExceeded:
            pytest.skip("oracle out of budget")
        assert b.lower <= o.upper * (1 + 1e-12)
        assert o.value <= b.upper * (1 + 1e-12)
