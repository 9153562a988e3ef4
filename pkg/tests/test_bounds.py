import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gapbound import bounds as b
from gapbound.errors import BadExponent, BadParams

p_open = st.floats(1.01, 2.0)
s_vals = st.floats(0.5, 50.0)
norms = st.floats(0.01, 100.0)
ns = st.integers(1, 10**6)


def inputs(p, s, f_norm, M=1.0, n=1):
    return b.BoundInputs(p=p, s=s, f_norm=f_norm, M=M, n=n)


class TestTheoremConstant:
    def test_p2_s1(self):
        assert b.constant_Cp_theorem(2, 1) == pytest.approx(math.sqrt(8), abs=1e-12)

    def test_p15_s2(self):
        assert b.constant_Cp_theorem(1.5, 2) == pytest.approx(4.0, abs=1e-12)

    @pytest.mark.parametrize("s", [0.5, 1.0, 7.0])
    def test_limit_at_one(self, s):
        assert b.constant_Cp_theorem(1 + 1e-12, s) == pytest.approx(2.0, rel=1e-9)

    @pytest.mark.parametrize("p", [1.0, 0.5, 2.1])
    def test_bad_exponent(self, p):
        with pytest.raises(BadExponent):
            b.constant_Cp_theorem(p, 1.0)


class TestTheoremBound:
    def test_examples(self):
        assert b.theorem_abs_error_bound(inputs(1.5, 2, 1, 1, 64)) == pytest.approx(1.0, abs=1e-12)
        assert b.theorem_abs_error_bound(inputs(2, 1, 0.5, 1, 2)) == pytest.approx(1.0, abs=1e-12)

    def test_bound_inputs_validation(self):
        with pytest.raises(BadParams):
            inputs(1.5, 1, 1, M=0.5)
        with pytest.raises(BadParams):
            inputs(1.5, 1, 1, n=0)
        with pytest.raises(BadExponent):
            inputs(2.5, 1, 1)
        assert inputs(1.5, 1, 1).q == pytest.approx(3.0)

    def test_p_equal_one_excluded(self):
        with pytest.raises(BadExponent):
            b.theorem_abs_error_bound(inputs(1.0, 1, 1))

    @given(p_open, s_vals, norms, st.floats(1.0, 10.0), ns)
    def test_decreasing_and_homogeneous(self, p, s, f_norm, M, n):
        here = b.theorem_abs_error_bound(inputs(p, s, f_norm, M, n))
        later = b.theorem_abs_error_bound(inputs(p, s, f_norm, M, n + 1))
        assert later < here
        scaled = b.theorem_abs_error_bound(inputs(p, s, 3.0 * f_norm, M, n))
        assert scaled == pytest.approx(3.0 * here, rel=1e-12)

    @given(s_vals, norms, st.floats(1.0, 10.0), ns)
    def test_matches_lemma_at_p2(self, s, r, M, n):
        thm = b.theorem_abs_error_bound(inputs(2.0, s, r, M, n))
        assert thm == pytest.approx(math.sqrt(b.lemma_mse_bound(s, r, n)) * M, rel=1e-12)


class TestLemmaAndProposition:
    def test_lemma_examples(self):
        assert b.lemma_mse_bound(1, 1, 8) == 1.0
        assert b.lemma_mse_bound(3, 0, 8) == 0.0
        assert b.lemma_mse_bound(2, 0.5, 32) == 0.25

    def test_prop_examples(self):
        for n in (1, 5, 80):
            assert b.prop_pmean_bound(2, 1, 1, n) == pytest.approx(8 / n)
        assert b.prop_pmean_bound(1, 3.7, 1, 11) == 2.0
        assert b.prop_pmean_bound(1.5, 1, 1, 8) == pytest.approx(math.sqrt(2), abs=1e-12)

    @given(s_vals, norms, ns)
    def test_prop_equals_lemma_at_p2(self, s, r, n):
        assert b.prop_pmean_bound(2, s, r, n) == b.lemma_mse_bound(s, r, n)

    @given(p_open, s_vals, norms, ns)
    def test_prop_homogeneous_and_decreasing(self, p, s, r, n):
        here = b.prop_pmean_bound(p, s, r, n)
        assert b.prop_pmean_bound(p, s, r, n + 1) < here
        assert b.prop_pmean_bound(p, s, 2 * r, n) == pytest.approx(2**p * here, rel=1e-12)

    @given(p_open, s_vals, norms, ns)
    def test_theorem_is_pth_root_of_prop(self, p, s, r, n):
        # with M = 1 the theorem bound is the proposition bound to the power 1/p
        thm = b.theorem_abs_error_bound(inputs(p, s, r, 1.0, n))
        assert thm == pytest.approx(b.prop_pmean_bound(p, s, r, n) ** (1 / p), rel=1e-10)


class TestCorollary:
    def test_examples(self):
        assert b.corollary_pmean_bound(1.3, 2, 1, 1.7, 9) == b.prop_pmean_bound(1.3, 2, 1.7, 9)
        assert b.corollary_pmean_bound(2, 1, 3, 1, 8) == pytest.approx(3.0)
        assert b.corollary_pmean_bound(1.5, 2, 4, 0, 8) == 0.0

    def test_constant(self):
        assert b.corollary_Cp(2, 1) == pytest.approx(8.0)
        assert b.corollary_Cp(1, 5) == pytest.approx(2.0)

    @given(st.floats(1.0, 2.0), s_vals, st.floats(1.0, 20.0), norms, ns)
    def test_dominates_proposition(self, p, s, M, r, n):
        assert b.corollary_pmean_bound(p, s, M, r, n) >= b.prop_pmean_bound(p, s, r, n)

    def test_rejects_small_M(self):
        with pytest.raises(BadParams):
            b.corollary_pmean_bound(2, 1, 0.5, 1, 8)


class TestRate:
    def test_examples(self):
        assert b.lower_bound_rate(1.5, 8) == pytest.approx(0.5)
        assert b.lower_bound_rate(1.3, 1) == 1.0
        assert b.lower_bound_rate(1.25, 16) == pytest.approx(16**-0.2, rel=1e-14)
        assert b.lower_bound_rate(1.25, 16) == pytest.approx(0.574349, abs=5e-7)

    @pytest.mark.parametrize("p", [1.0, 2.0])
    def test_endpoints_excluded(self, p):
        with pytest.raises(BadExponent):
            b.lower_bound_rate(p, 4)

    def test_theorem_rate(self):
        assert b.theorem_rate(2) == -0.5
        assert b.theorem_rate(1.5) == pytest.approx(-1 / 3)
