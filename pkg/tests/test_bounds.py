"""Bound computations: gamma2, additive adversary (with dual certificates),
multiplicative adversary (fixed c and sweep)."""

import math

import numpy as np
import pytest

from advbound import bounds, gram


@pytest.fixture(scope="module")
def or2():
    return gram.build_gram_set(gram.builtin("OR:2"))


@pytest.fixture(scope="module")
def id1():
    return gram.build_gram_set(gram.builtin("ID:1"))


# ------------------------------------------------------------------ gamma2

def test_gamma2_all_ones():
    assert bounds.gamma2(np.ones((4, 4))).value == pytest.approx(1.0, abs=1e-6)


def test_gamma2_identity():
    assert bounds.gamma2(np.eye(5)).value == pytest.approx(1.0, abs=1e-6)


def test_gamma2_j_minus_f_or2(or2):
    # Explicit factorization oracle: J - F for OR:2 is the 0/1 matrix marking
    # output disagreement; a hand factorization with row norms 1 gives
    # gamma2 <= 1, and the dual side reaches 1 (entry of magnitude 1).
    val = bounds.gamma2(or2.J - or2.F).value
    assert val == pytest.approx(1.0, abs=1e-6)


def test_gamma2_j_minus_f_at_most_two_corpus():
    for f in gram.builtin_corpus(max_n=3, boolean_only=True):
        g = gram.build_gram_set(f)
        assert bounds.gamma2(g.J - g.F).value <= 2.0 + 1e-6, f.name


def test_gamma2_two_sided_gap():
    rng = np.random.default_rng(11)
    for _ in range(10):
        m = int(rng.integers(2, 7))
        a = rng.standard_normal((m, m))
        a = (a + a.T) / 2
        rep = bounds.gamma2(a)
        assert rep.gap <= 1e-4 * (1 + rep.value), rep.gap


def test_gamma2_scaling():
    a = np.array([[1.0, 0.3], [0.3, -2.0]])
    v1 = bounds.gamma2(a).value
    v3 = bounds.gamma2(3 * a).value
    assert v3 == pytest.approx(3 * v1, rel=1e-5)


# ------------------------------------------------------------------- adv

def test_adv_id1_is_one(id1):
    rep = bounds.adv(id1.F, list(id1.deltas), seed=0)
    assert rep.status == "ok"
    assert rep.value == pytest.approx(1.0, abs=1e-6)


def test_adv_or2_sqrt2(or2):
    rep = bounds.adv(or2.F, list(or2.deltas), seed=0)
    assert rep.status == "ok"
    assert rep.value == pytest.approx(math.sqrt(2), abs=1e-6)


def test_adv_sign_matrix_doubles(or2):
    # J - sigma_f = 2 (J - F), so the bound doubles exactly.
    v_f = bounds.adv(or2.F, list(or2.deltas), seed=0).value
    v_s = bounds.adv(or2.sigma_f, list(or2.deltas), seed=0).value
    assert v_s == pytest.approx(2 * v_f, rel=1e-6)


def test_adv_constant_function_zero():
    g = gram.build_gram_set(gram.builtin("CONST:2"))
    rep = bounds.adv(g.F, list(g.deltas))
    assert rep.value == 0.0 and rep.status == "ok"


def test_adv_witness_feasible(or2):
    rep = bounds.adv(or2.F, list(or2.deltas), seed=0)
    gamma = np.asarray(rep.witness["Gamma"])
    # I +/- Gamma o (J - Delta_i) >= 0, rechecked from the raw witness
    for d in or2.deltas:
        z = gamma * (1.0 - d)
        w = np.linalg.eigvalsh(z)
        assert max(abs(w[0]), abs(w[-1])) <= 1.0 + 1e-7
    # and the claimed value is the reached spectral norm
    a = or2.J - or2.F
    np.fill_diagonal(a, 0.0)
    assert np.abs(np.linalg.eigvalsh(gamma * a)).max() == pytest.approx(
        rep.value, abs=1e-8)


def test_adv_pm_bracket_corpus():
    for f in gram.builtin_corpus(max_n=2, boolean_only=True):
        g = gram.build_gram_set(f)
        plain = bounds.adv(g.sigma_f, list(g.deltas), seed=0).value
        pm = bounds.adv(g.sigma_f, list(g.deltas), seed=0, pm=True).value
        assert pm <= plain + 1e-4, f.name
        assert plain <= 2 * pm + 1e-4, f.name


def test_adv_dim_cap():
    m = 40
    with pytest.raises(ValueError):
        bounds.adv(np.eye(m), [np.eye(m)])


# ------------------------------------------------------------------ madv

def test_madv_id1_closed_form(id1):
    # Oracle: W = [[c/2, -(c-1)/2], [-(c-1)/2, c/2]] is optimal; the
    # objective is Tr(W F) = c, so the value ln(c)/ln(c) = 1 for every c.
    for c in (1.1, 1.5, 2.0, 4.0):
        rep = bounds.madv_fixed_c(id1.F, list(id1.deltas), c)
        assert rep.status == "ok"
        assert rep.value == pytest.approx(1.0, abs=1e-6)
        assert rep.witness["objective"] == pytest.approx(c, abs=1e-6)


def test_madv_id1_sign_matrix_closed_form(id1):
    # Same W against sigma_f gives objective 2c - 1.
    for c in (1.5, 3.0):
        rep = bounds.madv_fixed_c(id1.sigma_f, list(id1.deltas), c)
        assert rep.witness["objective"] == pytest.approx(2 * c - 1, abs=1e-5)


def test_madv_uniform_w_lower_bound(or2):
    # W = I/m is always feasible with objective Tr(sigma)/m = 1, so the
    # value is never negative.
    rep = bounds.madv_fixed_c(or2.F, list(or2.deltas), 2.0)
    assert rep.value >= -1e-9


def test_madv_requires_c_above_one(or2):
    with pytest.raises(ValueError):
        bounds.madv_fixed_c(or2.F, list(or2.deltas), 1.0)


def test_madv_witness_residuals_small(or2):
    rep = bounds.madv_fixed_c(or2.F, list(or2.deltas), 3.0)
    w = bounds.multiplicative_witness(rep)
    scale = 1 + abs(w.objective)
    assert w.norm_residual <= 1e-6 * scale
    assert w.lmi_residual <= 1e-5 * scale


def test_madv_sweep_or2_sign(or2):
    # The sweep supremum approaches lam * adv / 2 = 2 sqrt(2) as c -> 1.
    sw = bounds.madv_sweep(or2.sigma_f, list(or2.deltas))
    assert sw.status == "ok"
    assert sw.value >= 2 * math.sqrt(2) - 1e-3
    assert sw.value <= 2 * math.sqrt(2) + 1e-3


def test_madv_sweep_monotone_envelope(id1):
    # Each grid point is a valid lower bound; the sweep returns the best.
    sw = bounds.madv_sweep(id1.sigma_f, list(id1.deltas))
    one_point = bounds.madv_fixed_c(id1.sigma_f, list(id1.deltas), 1.5)
    assert sw.value >= one_point.value - 1e-9
