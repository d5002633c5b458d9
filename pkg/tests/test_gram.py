"""Problem-matrix construction from finite functions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advbound import gram


def test_or2_matrices():
    g = gram.build_gram_set(gram.builtin("OR:2"))
    assert g.dim == 4
    assert g.index == ((0, 0), (0, 1), (1, 0), (1, 1))
    # f = [0, 1, 1, 1]: F[x,y] = 1 iff outputs agree
    expected_f = np.array([
        [1, 0, 0, 0],
        [0, 1, 1, 1],
        [0, 1, 1, 1],
        [0, 1, 1, 1],
    ], dtype=float)
    np.testing.assert_array_equal(g.F, expected_f)
    np.testing.assert_array_equal(g.sigma_f, 2 * expected_f - 1)
    # Delta_1 marks agreement on the first bit
    np.testing.assert_array_equal(
        g.deltas[0],
        np.array([[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]], float),
    )


def test_delta_diagonal_always_one():
    for spec in ("OR:2", "PARITY:2", "EQ:3", "MAJ:3"):
        g = gram.build_gram_set(gram.builtin(spec))
        for d in g.deltas:
            np.testing.assert_array_equal(np.diag(d), np.ones(g.dim))


def test_non_boolean_has_no_sigma_f():
    g = gram.build_gram_set(gram.builtin("ID:2"))
    assert g.sigma_f is None
    with pytest.raises(gram.FunctionSpecError):
        g.sigma("sigma_f")


def test_builtin_specs():
    assert gram.builtin("PARITY:3")((1, 1, 0)) == 0
    assert gram.builtin("MAJ:3")((1, 0, 1)) == 1
    assert gram.builtin("EQ:3")((2, 2)) == 1
    assert gram.builtin("EQ:3")((0, 2)) == 0
    assert gram.builtin("AND:2")((1, 1)) == 1
    with pytest.raises(gram.FunctionSpecError):
        gram.builtin("MAJ:2")  # even arity
    with pytest.raises(gram.FunctionSpecError):
        gram.builtin("WAT:3")


def test_tensor_instance_shapes_and_cap():
    g = gram.build_gram_set(gram.builtin("OR:2"))
    t = gram.tensor_instance(g, "sigma_f", 2)
    assert t.dim == 16
    assert set(t.deltas) == {(p, q) for p in (1, 2) for q in (1, 2)}
    with pytest.raises(gram.FunctionSpecError):
        gram.tensor_instance(g, "sigma_f", 5)  # 4^5 = 1024 > 512


def test_lifted_delta_structure():
    g = gram.build_gram_set(gram.builtin("ID:1"))
    t = gram.tensor_instance(g, "F", 3)
    d = g.deltas[0]
    j = np.ones((2, 2))
    np.testing.assert_array_equal(t.deltas[(2, 1)], np.kron(np.kron(j, d), j))
    np.testing.assert_array_equal(t.deltas[(1, 1)], np.kron(d, np.kron(j, j)))


@given(st.sampled_from(["ID:1", "OR:1", "OR:2", "PARITY:2", "AND:2"]),
       st.integers(1, 2))
@settings(max_examples=15, deadline=None)
def test_parity_phase_identity(spec, k):
    f = gram.builtin(spec)
    if f.domain and len(f.domain) ** k <= 32:
        assert gram.parity_phase_check(f, k)


def test_xor_power_outputs():
    f = gram.builtin("OR:1")  # identity on one bit
    g2 = gram.xor_power(f, 2)
    assert g2.arity == 2
    assert g2((0, 1)) == 1 and g2((1, 1)) == 0


def test_parse_function_file():
    text = """
    # a two-bit function
    arity: 2
    alphabet: 2
    codomain: 2
    0 0 -> 0
    01 -> 1
    1 0 → 1
    1 1 -> 0
    """
    f = gram.parse_function_file(text, name="xor2")
    assert f((0, 1)) == 1 and f((1, 1)) == 0
    assert f.name == "xor2"


def test_parse_rejects_bad_rows():
    with pytest.raises(gram.FunctionSpecError):
        gram.parse_function_file("arity: 1\nalphabet: 2\ncodomain: 2\nbogus line")
    with pytest.raises(gram.FunctionSpecError):
        gram.parse_function_file("0 -> 1")  # missing header fields


def test_resolve_function(tmp_path):
    assert gram.resolve_function("OR:2").name == "OR:2"
    p = tmp_path / "f.txt"
    p.write_text("arity: 1\nalphabet: 2\ncodomain: 2\n0 -> 1\n1 -> 0\n")
    f = gram.resolve_function(str(p))
    assert f((0,)) == 1
    with pytest.raises(gram.FunctionSpecError):
        gram.resolve_function("missing-file.txt")


def test_domain_validation():
    with pytest.raises(gram.FunctionSpecError):
        gram.FiniteFunction(arity=1, alphabet=2, codomain=2,
                            domain=((0,), (0,)), outputs=(0, 1))
    with pytest.raises(gram.FunctionSpecError):
        gram.FiniteFunction(arity=1, alphabet=2, codomain=2,
                            domain=((0,), (3,)), outputs=(0, 1))


def test_builtin_corpus_unique_and_bounded():
    corpus = gram.builtin_corpus(max_n=3)
    names = [f.name for f in corpus]
    assert len(names) == len(set(names))
    assert all(f.arity <= 3 for f in corpus)
    assert "MAJ:3" in names and "EQ:3" in names
