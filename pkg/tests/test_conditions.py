import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linscreen.conditions import (
    Ar,
    Bounded,
    adversarial_beta,
    consistency_check,
    screen_constant,
    corollary1_sufficient,
    dom_necessary_check,
    ic_check,
    ic_sign_enumeration,
    ic_worst_case,
    irrepresentable_matrix,
    rdd_brute_force,
    rdd_check,
    rdd_max_c0,
    signed_rdd_margin,
    sparse_riesz,
)
from linscreen.errors import (
    AsymmetricInput,
    BadDiagonal,
    BadSigns,
    BadSparsity,
    IndexOverlap,
    SingularSubmatrix,
    TooLarge,
    ValidationError,
)
from linscreen.experiments import random_symmetric
from linscreen.model import SparseCoefficients
from linscreen.screeners import ScreeningMatrix


def equi(p, r):
    return np.full((p, p), r) + (1 - r) * np.eye(p)


def vertex_betas(p, s, rho):
    """Every beta with support size 1..s, magnitudes in {1, rho} (one equal to 1) and any signs."""
    for t in range(1, s + 1):
        for support in itertools.combinations(range(p), t):
            for mags in itertools.product((1.0, rho), repeat=t - 1):
                for signs in itertools.product((1.0, -1.0), repeat=t):
                    vals = np.array((1.0, *mags)) * np.array(signs)
                    for shift in range(t):
                        yield SparseCoefficients(p, support, tuple(np.roll(vals, shift)))


def noiseless_consistent_everywhere(phi, s, rho):
    return all(consistency_check(phi @ b.dense(), b).strong for b in vertex_betas(phi.shape[0], s, rho))


# the adversarial construction fails on this matrix although RDD fails
GAP_MATRIX = np.array([[1.0, -0.5, 0.3], [-0.5, 10.0, -0.3], [0.3, -0.3, 10.0]])


class TestRddExamples:
    def test_identity(self):
        rep = rdd_check(np.eye(6), 3, 10.0)
        assert rep.holds and rep.margin == 1.0 and rep.c0_max == math.inf
        assert rdd_max_c0(np.eye(6), 3) == math.inf

    def test_small_equicorrelated_holds(self):
        rep = rdd_check(equi(5, 0.1), 2, 2.0)
        assert rep.holds
        assert rep.margin == pytest.approx(1 - 2 * 0.2 - 0.1)
        assert rdd_max_c0(equi(5, 0.1), 2) == pytest.approx(4.5)

    def test_equicorrelated_fails(self):
        rep = rdd_check(equi(4, 0.4), 3, 1.0)
        assert not rep.holds
        assert rep.c0_max == pytest.approx(0.375)
        assert rep.margin == pytest.approx(1 - 1.6 - 0.4)
        w = rep.witness
        assert w.i != w.k and len(w.I) == 2 and not {w.i, w.k} & set(w.I)

    @pytest.mark.parametrize("phi,s,c0", [(np.eye(6), 3, 10.0), (equi(5, 0.1), 2, 2.0), (equi(4, 0.4), 3, 1.0)])
    def test_brute_force_agrees(self, phi, s, c0):
        fast, slow = rdd_check(phi, s, c0), rdd_brute_force(phi, s, c0)
        assert fast.holds == slow.holds
        assert fast.c0_max == pytest.approx(slow.c0_max, rel=1e-12)
        assert fast.margin == pytest.approx(slow.margin, abs=1e-12)

    def test_shift_is_applied(self):
        phi = ScreeningMatrix(equi(5, 0.1), diag_shift=0.55)
        assert not rdd_check(phi, 2, 2.0).holds
        assert rdd_check(ScreeningMatrix(equi(5, 0.1), diag_shift=0.45), 2, 2.0).holds

    def test_sparsity_one_reduces_to_pairs(self):
        phi = np.array([[1.0, 0.9, 0.0], [0.9, 1.0, 0.0], [0.0, 0.0, 1.0]])
        assert rdd_check(phi, 1, 5.0).holds
        assert not rdd_check(np.array([[1.0, 1.0], [1.0, 1.0]]), 1, 1.0).holds


class TestRddValidation:
    def test_asymmetric(self):
        phi = np.eye(3)
        phi[0, 1] = 1e-6
        with pytest.raises(AsymmetricInput):
            rdd_check(phi, 2, 1.0)

    def test_tiny_asymmetry_symmetrized(self):
        phi = equi(4, 0.1)
        phi[0, 1] += 1e-10
        assert rdd_check(phi, 2, 1.0).holds

    @pytest.mark.parametrize("s", [0, 4])
    def test_bad_sparsity(self, s):
        with pytest.raises(BadSparsity):
            rdd_check(np.eye(4), s, 1.0)

    def test_c0_below_one(self):
        with pytest.raises(ValidationError):
            rdd_check(np.eye(4), 2, 0.5)

    def test_brute_force_size_guard(self):
        with pytest.raises(TooLarge):
            rdd_brute_force(np.eye(60), 8, 1.0)


class TestRddProperties:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(3, 8), st.data())
    def test_fast_matches_brute_force(self, seed, p, data):
        s = data.draw(st.integers(1, p - 1))
        c0 = data.draw(st.sampled_from([1.0, 1.3, 2.0, 4.0]))
        phi = random_symmetric(np.random.default_rng(seed), p) * data.draw(st.sampled_from([1.0, 0.3, 0.05]))
        phi += np.eye(p) * data.draw(st.sampled_from([0.0, 1.0]))
        fast, slow = rdd_check(phi, s, c0), rdd_brute_force(phi, s, c0)
        assert fast.holds == slow.holds
        assert fast.margin == pytest.approx(slow.margin, abs=1e-12)
        if math.isinf(slow.c0_max):
            assert fast.c0_max == slow.c0_max
        else:
            assert fast.c0_max == pytest.approx(slow.c0_max, rel=1e-9, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(3, 10), st.data())
    def test_c0_max_is_threshold(self, seed, p, data):
        s = data.draw(st.integers(1, p - 1))
        phi = np.eye(p) + 0.05 * random_symmetric(np.random.default_rng(seed), p)
        cmax = rdd_max_c0(phi, s)
        if math.isfinite(cmax) and cmax > 1.01:
            assert rdd_check(phi, s, 0.99 * cmax).holds
            assert not rdd_check(phi, s, cmax * 1.01).holds

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(3, 10), st.data())
    def test_monotone_in_s_and_c0(self, seed, p, data):
        s = data.draw(st.integers(2, p - 1))
        phi = np.eye(p) + data.draw(st.floats(0.01, 0.5)) * random_symmetric(np.random.default_rng(seed), p)
        phi = 0.5 * (phi + phi.T)
        if rdd_check(phi, s, 2.0).holds:
            assert rdd_check(phi, s - 1, 2.0).holds
            assert rdd_check(phi, s, 1.5).holds
            assert dom_necessary_check(phi, s, 2.0)

    def test_signed_margin_bounds_rdd_margin(self, rng):
        for _ in range(50):
            p = int(rng.integers(3, 9))
            s = int(rng.integers(1, p))
            phi = np.eye(p) + rng.uniform(0.01, 0.5) * random_symmetric(rng, p)
            assert signed_rdd_margin(phi, s, 1.5) >= rdd_check(phi, s, 1.5).margin - 1e-12


class TestNoiselessEquivalence:
    def test_gap_counterexample(self):
        rep = rdd_check(GAP_MATRIX, 2, 1.0)
        assert not rep.holds
        assert signed_rdd_margin(GAP_MATRIX, 2, 1.0) > 0
        assert noiseless_consistent_everywhere(GAP_MATRIX, 2, 1.0)
        for b in adversarial_beta(GAP_MATRIX, rep.witness.i, rep.witness.k, rep.witness.I, 1.0):
            assert consistency_check(GAP_MATRIX @ b.dense(), b).strong

    def test_signed_margin_decides_consistency(self, rng):
        # vertex enumeration is an independent oracle for the noiseless class
        seen = {True: 0, False: 0}
        for _ in range(60):
            p, s, rho = 5, 2, float(rng.choice([1.0, 1.5, 2.0]))
            phi = np.eye(p) + rng.uniform(0.05, 0.5) * random_symmetric(rng, p)
            phi = 0.5 * (phi + phi.T)
            signed_ok = signed_rdd_margin(phi, s, rho) > 0
            assert noiseless_consistent_everywhere(phi, s, rho) == signed_ok
            seen[signed_ok] += 1
            if rdd_check(phi, s, rho).holds:
                assert signed_ok
        assert min(seen.values()) > 0

    def test_witness_breaks_when_signed_margin_fails(self, rng):
        hits = 0
        for _ in range(100):
            p, s = 6, 3
            phi = np.eye(p) + rng.uniform(0.05, 0.4) * random_symmetric(rng, p)
            phi = 0.5 * (phi + phi.T)
            rep = rdd_check(phi, s, 1.5)
            if signed_rdd_margin(phi, s, 1.5) <= 0:
                w = rep.witness
                assert any(
                    not consistency_check(phi @ b.dense(), b).strong for b in adversarial_beta(phi, w.i, w.k, w.I, 1.5)
                )
                hits += 1
        assert hits > 10


class TestAdversarialBeta:
    def test_sign_readout(self):
        phi = np.array([[1.0, 0.1, 0.5, 0.4], [0.1, 1.0, -0.2, -0.3], [0.5, -0.2, 1.0, 0.0], [0.4, -0.3, 0.0, 1.0]])
        minus, plus = adversarial_beta(phi, 0, 1, (2, 3), 2.0)
        assert minus.support == (0, 2, 3) and minus.values == (1.0, -2.0, -2.0)
        assert plus.values == (1.0, -2.0, -2.0)

    def test_empty_subset(self):
        minus, plus = adversarial_beta(np.eye(3), 1, 2, (), 2.0)
        np.testing.assert_array_equal(minus.dense(), [0, 1, 0])
        assert minus == plus

    def test_sign_zero_is_positive(self):
        phi = np.array([[1.0, 0.0, 0.3], [0.0, 1.0, 0.3], [0.3, 0.3, 1.0]])
        minus, _ = adversarial_beta(phi, 0, 1, (2,), 3.0)
        assert minus.values == (1.0, -3.0)

    def test_overlap(self):
        with pytest.raises(IndexOverlap):
            adversarial_beta(np.eye(4), 0, 1, (1,), 2.0)


class TestDomNecessary:
    def test_examples(self):
        assert dom_necessary_check(np.eye(4), 3, 1.0)
        phi = np.eye(4)
        phi[0, 1:] = phi[1:, 0] = 0.6
        assert not dom_necessary_check(phi, 3, 1.0)


class TestConsistency:
    def test_exact(self):
        b = SparseCoefficients(4, (1, 2), (2.0, -1.0))
        assert consistency_check(b.dense(), b).strong

    def test_tie_fails(self):
        v = consistency_check([0.5, 0.5], SparseCoefficients(2, (0,), (1.0,)))
        assert not v.ordering_ok and v.separation == 0.0

    def test_wrong_sign(self):
        v = consistency_check([-2.0, 0.1], SparseCoefficients(2, (0,), (1.0,)))
        assert v.ordering_ok and not v.signs_ok and not v.strong

    def test_zero_estimate_has_no_sign(self):
        assert not consistency_check([0.0, 0.0], SparseCoefficients(2, (0,), (1.0,))).signs_ok


class TestIrrepresentable:
    def test_identity(self):
        assert ic_check(np.eye(5), [1, 3], [1, -1]).value == 0.0
        assert ic_worst_case(np.eye(5), [0, 2, 4]).value == 0.0

    def test_single_support(self):
        assert ic_check(equi(3, 0.5), [0], [1]).value == pytest.approx(0.5)

    def test_two_by_two(self):
        c = np.array([[1.0, 0.5, 0.9], [0.5, 1.0, 0.9], [0.9, 0.9, 1.0]])
        rep = ic_check(c, [0, 1], [1, 1], theta=0.01)
        assert rep.value == pytest.approx(1.2)
        assert rep.holds is False
        assert ic_worst_case(c, [0, 1]).value == pytest.approx(1.2)

    def test_signs_follow_support_order(self):
        c = np.array([[1.0, 0.0, 0.5], [0.0, 1.0, 0.1], [0.5, 0.1, 1.0]])
        a = ic_check(c, [2, 0], [1, -1]).value
        b = ic_check(c, [0, 2], [-1, 1]).value
        assert a == pytest.approx(b)

    def test_matches_solve(self, rng):
        z = rng.standard_normal((40, 7))
        c = z.T @ z / 40
        S, Sc = [1, 4, 5], [0, 2, 3, 6]
        expect = c[np.ix_(Sc, S)] @ np.linalg.inv(c[np.ix_(S, S)])
        np.testing.assert_allclose(irrepresentable_matrix(c, S), expect, atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 8))
    def test_worst_case_equals_enumeration(self, seed, s):
        rng = np.random.default_rng(seed)
        z = rng.standard_normal((25, 10))
        c = z.T @ z / 25
        S = rng.choice(10, s, replace=False).tolist()
        assert abs(ic_worst_case(c, S).value - ic_sign_enumeration(c, S)) <= 1e-12

    def test_errors(self):
        with pytest.raises(BadSigns):
            ic_check(np.eye(3), [0, 1], [1])
        with pytest.raises(BadSigns):
            ic_check(np.eye(3), [0, 1], [1, 0])
        with pytest.raises(ValidationError):
            ic_check(np.eye(3), [0, 0], [1, 1])
        singular = np.ones((3, 3))
        with pytest.raises(SingularSubmatrix):
            ic_worst_case(singular, [0, 1])


class TestSparseRiesz:
    def test_orthonormal(self):
        q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((20, 5)))
        x = q * math.sqrt(20)
        for s in range(1, 6):
            assert sparse_riesz(x, s) == pytest.approx(1.0)

    def test_two_columns(self):
        r = 0.3
        x = np.linalg.cholesky(np.array([[1.0, r], [r, 1.0]])).T * math.sqrt(2)
        assert sparse_riesz(x, 2) == pytest.approx(1 - r)

    def test_single_column_of_standardized(self, rng):
        from linscreen.model import standardize

        assert sparse_riesz(standardize(rng.standard_normal((30, 6))), 1) == pytest.approx(1.0)

    def test_interlacing(self, rng):
        x = rng.standard_normal((30, 7))
        vals = [sparse_riesz(x, s) for s in range(1, 8)]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_guard(self):
        with pytest.raises(TooLarge):
            sparse_riesz(np.eye(60), 10)


class TestCorollary:
    def test_bounded(self):
        phi = equi(6, 0.1)
        assert corollary1_sufficient(phi, 2, Bounded(0.5))
        assert rdd_check(phi, 2, screen_constant(Bounded(0.5))).holds
        assert not corollary1_sufficient(equi(6, 0.2), 2, Bounded(0.5))

    def test_ar(self):
        p = 8
        lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
        phi = 0.9 * 0.5**lag
        np.fill_diagonal(phi, 1.0)
        assert corollary1_sufficient(phi, 3, Ar(0.5))
        assert screen_constant(Ar(0.5)) == pytest.approx(0.125)

    def test_ar_implies_rdd_when_constant_at_least_one(self, rng):
        r = 0.1
        c0 = screen_constant(Ar(r))
        assert c0 >= 1
        p = 10
        lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
        for _ in range(30):
            off = np.triu(rng.uniform(-1, 1, (p, p)), 1)
            phi = (off + off.T) * r**lag
            np.fill_diagonal(phi, 1.0)
            assert corollary1_sufficient(phi, p - 1, Ar(r))
            assert rdd_check(phi, p - 1, c0).holds

    def test_bounded_implies_rdd(self, rng):
        for _ in range(30):
            p, s, c = 9, int(rng.integers(1, 8)), float(rng.uniform(0.1, 0.9))
            off = np.triu(rng.uniform(-1, 1, (p, p)), 1) * (c / (2 * s)) * 0.999
            phi = np.eye(p) + off + off.T
            assert corollary1_sufficient(phi, s, Bounded(c))
            assert rdd_check(phi, s, 1 / c).holds

    def test_needs_unit_diagonal(self):
        with pytest.raises(BadDiagonal):
            corollary1_sufficient(2 * np.eye(3), 2, Bounded(0.5))
