import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hlineq.tensor import (
    CoefficientTensor,
    diagonal_form,
    flat_norm,
    lift,
    littlewood_power,
    load_tensor,
    mixed_norm,
    random_gaussian,
    random_unimodular,
    save_tensor,
    slice_tensor,
)

exps = st.sampled_from(["1", "3/2", "2", "12/5", "3", "4", "inf"])


def nested_reference(c, qs):
    """Direct nested sums, outermost first, in plain Python floats."""
    if c.ndim == 0:
        return abs(float(c))
    vals = [nested_reference(c[j], qs[1:]) for j in range(c.shape[0])]
    q = qs[0]
    if math.isinf(q):
        return max(vals)
    return sum(v**q for v in vals) ** (1 / q)


def _val(q):
    return math.inf if q == "inf" else Fraction(q)


def small_tensor(seed, m, n):
    return random_gaussian(m, n, seed)


class TestConstruction:
    def test_immutable(self):
        t = diagonal_form(2, 3)
        with pytest.raises(ValueError):
            t.coeffs[0, 0] = 5.0

    def test_rejects_ragged(self):
        with pytest.raises(ValueError):
            CoefficientTensor(np.zeros((2, 3)))

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            CoefficientTensor([[1.0, math.nan], [0, 0]])

    def test_evaluate_multilinear(self):
        t = random_gaussian(3, 3, 1)
        x, y, z = np.eye(3)[0], np.array([1.0, 2.0, 0.5]), np.array([0.0, -1.0, 1.0])
        direct = sum(t.coeffs[i, j, k] * x[i] * y[j] * z[k]
                     for i in range(3) for j in range(3) for k in range(3))
        assert t(x, y, z) == pytest.approx(direct, rel=1e-14)

    def test_diagonal(self):
        t = diagonal_form(3, 2)
        assert t.coeffs[0, 0, 0] == t.coeffs[1, 1, 1] == 1.0
        assert t.coeffs.sum() == 2.0

    def test_littlewood_powers(self):
        t = littlewood_power(2, 3)
        assert t.n == 8
        # Kronecker powers of a Hadamard matrix stay orthogonal: H H^T = n I
        np.testing.assert_array_equal(t.coeffs @ t.coeffs.T, 8 * np.eye(8))
        with pytest.raises(ValueError):
            littlewood_power(3, 1)

    def test_seeded_generators_reproduce(self):
        assert random_unimodular(3, 4, 7) == random_unimodular(3, 4, 7)
        assert random_unimodular(3, 4, 7) != random_unimodular(3, 4, 8)
        assert set(np.unique(random_unimodular(2, 6, 0).coeffs)) <= {-1.0, 1.0}
        np.testing.assert_array_equal(random_gaussian(2, 3, 5).coeffs, random_gaussian(2, 3, 5).coeffs)

    def test_permuted(self):
        t = random_gaussian(3, 2, 4)
        p = t.permuted((2, 0, 1))
        assert p.coeffs[1, 0, 1] == t.coeffs[0, 1, 1]


class TestMixedNorm:
    def test_examples(self):
        assert mixed_norm(diagonal_form(2, 4), ["2", "2"]) == pytest.approx(2.0, rel=1e-15)
        # rows of the Littlewood matrix: l_{4/3} of (1, 1) = 2^{3/4}, outer l_{4/3} of two of them
        assert mixed_norm(littlewood_power(2, 1), ["4/3", "4/3"]) == pytest.approx(2**1.5, rel=1e-15)
        assert mixed_norm(littlewood_power(2, 1), ["inf", "1"]) == 2.0

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 4), st.data())
    def test_matches_reference(self, seed, m, n, data):
        spec = [data.draw(exps) for _ in range(m)]
        t = small_tensor(seed, m, n)
        qs = [math.inf if s == "inf" else float(Fraction(s)) for s in spec]
        assert mixed_norm(t, spec) == pytest.approx(nested_reference(t.coeffs, qs), rel=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 4), exps)
    def test_flat_collapse(self, seed, m, n, q):
        t = small_tensor(seed, m, n)
        qf = math.inf if q == "inf" else float(Fraction(q))
        assert mixed_norm(t, [q] * m) == pytest.approx(flat_norm(t, qf), rel=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 4), st.floats(-1e3, 1e3), st.data())
    def test_homogeneity(self, seed, m, n, lam, data):
        spec = [data.draw(exps) for _ in range(m)]
        t = small_tensor(seed, m, n)
        assert mixed_norm(t.scaled(lam), spec) == pytest.approx(abs(lam) * mixed_norm(t, spec), rel=1e-12, abs=1e-300)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 4), st.data())
    def test_monotone_in_each_exponent(self, seed, m, n, data):
        spec = [data.draw(exps) for _ in range(m)]
        axis = data.draw(st.integers(0, m - 1))
        bigger = list(spec)
        bigger[axis] = data.draw(exps.filter(lambda q: _val(q) >= _val(spec[axis])))
        t = small_tensor(seed, m, n)
        assert mixed_norm(t, bigger) <= mixed_norm(t, spec) * (1 + 1e-12)

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            mixed_norm(diagonal_form(2, 2), ["2"])


class TestLiftSlice:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 3), st.integers(1, 2))
    def test_round_trip(self, seed, m, n, k):
        s = small_tensor(seed, m, n)
        t = lift(s, k)
        assert t.m == m + k
        assert slice_tensor(t, {i: 0 for i in range(k)}) == s
        # every other leading index is zero
        if n > 1:
            assert not np.any(slice_tensor(t, {0: 1}).coeffs)

    def test_slice_errors(self):
        t = diagonal_form(3, 2)
        with pytest.raises(IndexError):
            slice_tensor(t, {3: 0})
        with pytest.raises(IndexError):
            slice_tensor(t, {0: 2})
        with pytest.raises(ValueError):
            slice_tensor(t, {0: 0, 1: 0, 2: 0})


class TestSerialization:
    @pytest.mark.parametrize("suffix", [".json", ".bin"])
    def test_round_trip(self, tmp_path, suffix):
        t = random_gaussian(3, 3, 11)
        path = save_tensor(tmp_path / f"t{suffix}", t)
        back = load_tensor(path)
        assert back == t

    def test_binary_layout(self, tmp_path):
        t = diagonal_form(2, 2)
        raw = save_tensor(tmp_path / "t.bin", t).read_bytes()
        assert raw[:4] == b"HLTN"
        hlen = int.from_bytes(raw[4:8], "little")
        assert len(raw) == 8 + hlen + 8 * 4
        assert np.frombuffer(raw[8 + hlen:], "<f8").tolist() == [1.0, 0.0, 0.0, 1.0]

    def test_truncated(self, tmp_path):
        path = save_tensor(tmp_path / "t.bin", diagonal_form(2, 3))
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ValueError):
            load_tensor(path)

    def test_foreign_json(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text('{"format": "other", "m": 1, "n": 1}')
        with pytest.raises(ValueError):
            load_tensor(path)
