"""Output-condition machinery: alignment SDP, masked fidelity, classical
expectation lemmas, gamma2 sandwich."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advbound import outcond


def random_pair(rng, m, n):
    a = rng.standard_normal((m, n))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b = rng.standard_normal((m, n))
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    return outcond.VectorFamilyPair(a, b)


# --------------------------------------------------------------- families

def test_family_padding():
    pair = outcond.VectorFamilyPair(np.eye(2), np.eye(3)[:2])
    assert pair.ambient_dim == 3
    assert pair.a.shape == (2, 3)


def test_family_rejects_non_unit():
    with pytest.raises(outcond.OutcondError):
        outcond.VectorFamilyPair(2 * np.eye(2), np.eye(2))


def test_family_from_grams_round_trip():
    rng = np.random.default_rng(3)
    pair = random_pair(rng, 4, 3)
    back = outcond.family_pair_from_grams(pair.rho, pair.sigma)
    np.testing.assert_allclose(back.rho, pair.rho, atol=1e-9)
    np.testing.assert_allclose(back.sigma, pair.sigma, atol=1e-9)


# -------------------------------------------------------------- alignment

def test_alignment_identical_families_is_one():
    pair = outcond.VectorFamilyPair(np.eye(3), np.eye(3))
    assert outcond.best_alignment(pair) == pytest.approx(1.0, abs=1e-6)


def test_alignment_single_pair_is_one():
    # For a single pair of unit vectors a unitary can always rotate b onto a,
    # so both sides of the alignment/fidelity identity are 1 (the 1x1 Gram
    # matrices are both [1]) -- even when a and b are orthogonal.
    pair = outcond.VectorFamilyPair(np.array([[1.0, 0.0]]),
                                    np.array([[0.0, 1.0]]))
    assert outcond.best_alignment(pair) == pytest.approx(1.0, abs=1e-6)
    f, _ = outcond.min_vec_fidelity(pair.rho, pair.sigma)
    assert f == pytest.approx(1.0, abs=1e-9)


def test_alignment_orthonormal_vs_repeated():
    # a = (e1, e2), b = (e1, e1): rho = I, sigma = J.  The masked fidelity is
    # trnorm(D(w) B) = sqrt(w1^2 + w2^2) over the simplex, minimized at the
    # uniform w with value 1/sqrt(2); the alignment SDP must agree.
    a = np.eye(2)
    b = np.array([[1.0, 0.0], [1.0, 0.0]])
    pair = outcond.VectorFamilyPair(a, b)
    t = outcond.best_alignment(pair)
    assert t == pytest.approx(2**-0.5, abs=1e-6)
    f, u = outcond.min_vec_fidelity(pair.rho, pair.sigma)
    assert f == pytest.approx(2**-0.5, abs=1e-8)
    np.testing.assert_allclose(np.abs(u), np.full(2, 2**-0.5), atol=1e-5)


def test_alignment_matches_min_fidelity_random():
    rng = np.random.default_rng(12)
    for trial in range(10):
        pair = random_pair(rng, int(rng.integers(2, 6)), int(rng.integers(2, 6)))
        t = outcond.best_alignment(pair)
        f, u = outcond.min_vec_fidelity(pair.rho, pair.sigma, seed=trial)
        assert abs(t - f) <= 2e-3
        assert t <= f + 1e-6  # SDP side is exact, heuristic side upper
        assert np.linalg.norm(u) == pytest.approx(1.0, abs=1e-9)


def test_alignment_witness_near_unitary_on_generic_instance():
    rng = np.random.default_rng(5)
    pair = random_pair(rng, 4, 4)
    t, v, dev = outcond.alignment_witness(pair)
    # the optimum of this linear objective is attained at an extreme
    # contraction; on a generic instance that extreme point is unitary
    assert t == pytest.approx(outcond.best_alignment(pair), abs=1e-6)
    assert dev <= 1e-3


def test_min_vec_fidelity_equal_grams_is_one():
    rng = np.random.default_rng(8)
    pair = random_pair(rng, 4, 3)
    f, _ = outcond.min_vec_fidelity(pair.rho, pair.rho)
    assert f == pytest.approx(1.0, abs=1e-9)


def test_min_vec_fidelity_identity_vs_ones():
    # rho = I, sigma = J (dim 2): F(diag(w), w w^T-ish) -- compare against the
    # alignment SDP on realizing families.
    rho = np.eye(2)
    sigma = np.ones((2, 2))
    f, _ = outcond.min_vec_fidelity(rho, sigma)
    pair = outcond.family_pair_from_grams(rho, sigma)
    t = outcond.best_alignment(pair)
    assert abs(t - f) <= 1e-3


def test_dimension_cap():
    big = np.eye(40)
    with pytest.raises(outcond.OutcondError):
        outcond.best_alignment(outcond.VectorFamilyPair(big, big))


# ---------------------------------------------------- classical fidelity

def test_dist_fidelity_values():
    p = outcond.ClassicalDistribution((1.0, 3.0), (0.5, 0.5))
    q = outcond.ClassicalDistribution((1.0, 3.0), (1.0, 0.0))
    assert outcond.dist_fidelity(p, p) == pytest.approx(1.0)
    assert outcond.dist_fidelity(p, q) == pytest.approx(math.sqrt(0.5))
    disj_a = outcond.ClassicalDistribution((1.0, 2.0), (1.0, 0.0))
    disj_b = outcond.ClassicalDistribution((1.0, 2.0), (0.0, 1.0))
    assert outcond.dist_fidelity(disj_a, disj_b) == 0.0


def test_dist_fidelity_support_mismatch():
    p = outcond.ClassicalDistribution((1.0,), (1.0,))
    q = outcond.ClassicalDistribution((2.0,), (1.0,))
    with pytest.raises(outcond.OutcondError):
        outcond.dist_fidelity(p, q)


def test_distribution_validation():
    with pytest.raises(outcond.OutcondError):
        outcond.ClassicalDistribution((0.0, 1.0), (0.5, 0.5))  # zero support
    with pytest.raises(outcond.OutcondError):
        outcond.ClassicalDistribution((1.0, 2.0), (0.7, 0.7))  # not normalized


def test_min_expectation_example():
    # p uniform on {1,3}, delta = 0.81:
    # closed = 0.81 / ((1/2)(1 + 1/3)) = 0.81 * 3/2 = 1.215
    p = outcond.ClassicalDistribution((1.0, 3.0), (0.5, 0.5))
    num, closed = outcond.min_expectation_under_fidelity(p, 0.81)
    assert closed == pytest.approx(1.215, abs=1e-12)
    assert num >= closed - 1e-8


def test_min_expectation_delta_one_forces_p():
    p = outcond.ClassicalDistribution((1.0, 3.0), (0.5, 0.5))
    num, closed = outcond.min_expectation_under_fidelity(p, 1.0)
    assert num == pytest.approx(p.expectation(), abs=1e-6)
    assert closed == pytest.approx(1.0 / p.inv_expectation(), abs=1e-12)
    assert closed <= num + 1e-9  # Jensen ordering


def test_min_expectation_single_point():
    p = outcond.ClassicalDistribution((2.5,), (1.0,))
    num, closed = outcond.min_expectation_under_fidelity(p, 0.4)
    assert closed == pytest.approx(0.4 * 2.5, abs=1e-12)
    assert num >= closed - 1e-8


def test_min_expectation_rejects_bad_delta():
    p = outcond.ClassicalDistribution((1.0,), (1.0,))
    with pytest.raises(outcond.OutcondError):
        outcond.min_expectation_under_fidelity(p, 0.0)
    with pytest.raises(outcond.OutcondError):
        outcond.min_expectation_under_fidelity(p, 1.5)


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_expectation_fidelity_inequality_random(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 5))
    p = outcond.ClassicalDistribution(
        tuple(float(x) for x in rng.uniform(0.1, 4.0, m)),
        tuple(float(x) for x in rng.dirichlet(np.ones(m))),
    )
    delta = float(rng.uniform(0.05, 1.0))
    num, closed = outcond.min_expectation_under_fidelity(p, delta)
    assert num >= closed - 1e-8


# --------------------------------------------------- inverse expectation

def test_inv_expectation_examples():
    assert outcond.inv_expectation_bound(
        outcond.SupportBounds(2.0, 2.0, 2.0)) == pytest.approx(0.5)
    assert outcond.inv_expectation_bound(
        outcond.SupportBounds(1.0, 3.0, 2.0)) == pytest.approx(2 / 3)


def test_inv_expectation_lp_matches_closed_form():
    sb = outcond.SupportBounds(1.0, 3.0, 2.0)
    assert outcond.inv_expectation_lp(sb, 50) == pytest.approx(2 / 3, abs=1e-8)


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_inv_expectation_lp_random(seed):
    rng = np.random.default_rng(seed)
    a0 = float(rng.uniform(0.1, 2.0))
    a1 = a0 + float(rng.uniform(0.0, 3.0))
    abar = float(rng.uniform(a0, a1))
    sb = outcond.SupportBounds(a0, a1, abar)
    assert outcond.inv_expectation_lp(sb) == pytest.approx(
        outcond.inv_expectation_bound(sb), abs=1e-8)


def test_support_bounds_ordering():
    with pytest.raises(outcond.OutcondError):
        outcond.SupportBounds(2.0, 1.0, 1.5)
    with pytest.raises(outcond.OutcondError):
        outcond.SupportBounds(0.0, 1.0, 0.5)


def test_product_bound():
    sb = outcond.SupportBounds(1.0, 3.0, 2.0)
    v1 = outcond.product_expectation_bound(0.7, sb, 1)
    assert v1 == pytest.approx(0.7 / (2 / 3), abs=1e-12)
    assert outcond.product_expectation_bound(0.7, sb, 3) == pytest.approx(
        v1**3, abs=1e-12)
    assert outcond.product_expectation_bound(
        1.0, outcond.SupportBounds(2.0, 2.0, 2.0), 4) == pytest.approx(16.0)


def test_product_bound_brute_force_k2():
    # Two-point support, k = 2: enumerate q over a product grid subject to
    # F(p o p, q) >= delta^{... } -- the bound never exceeds the minimum.
    p = outcond.ClassicalDistribution((1.0, 3.0), (0.5, 0.5))
    delta = 0.8
    sb = outcond.SupportBounds(1.0, 3.0, p.expectation())
    bound = outcond.product_expectation_bound(delta, sb, 2)
    pk = np.kron(p.probs, p.probs)
    ak = np.kron(p.support, p.support)
    best = np.inf
    rng = np.random.default_rng(0)
    for _ in range(4000):
        q = rng.dirichlet(np.ones(4) * rng.uniform(0.2, 3.0))
        if np.sqrt(pk * q).sum() >= math.sqrt(delta**2):
            best = min(best, float(q @ ak))
    assert best >= bound - 1e-9


# ---------------------------------------------------------------- sandwich

def test_sandwich_identical_families():
    pair = outcond.VectorFamilyPair(np.eye(3), np.eye(3))
    lhs, mid, rhs = outcond.gamma2_error_sandwich(pair)
    assert abs(lhs) <= 1e-6 and abs(mid) <= 1e-6 and abs(rhs) <= 2e-3


def test_sandwich_random():
    rng = np.random.default_rng(21)
    for _ in range(5):
        pair = random_pair(rng, 4, 4)
        lhs, mid, rhs = outcond.gamma2_error_sandwich(pair)
        assert lhs <= mid + 1e-6
        assert mid <= rhs + 1e-6
