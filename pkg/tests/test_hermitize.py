"""Complex rotations that make Pauli vectors real."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qesmatrix.hermitize import (DegenerateRotation, NotReducible, SimilarityTransform, cross, dot,
                                 hermitian_representative_exists, is_hermitian, lambda_ij,
                                 pauli_matrix, reduce, reduce_pair, reduce_single, reduce_triple)


def complexify(rng, vectors):
    """Hide real vectors behind a random complex similarity; the invariants survive."""
    L = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    T = SimilarityTransform(L)
    return [T.transform_vector(v) for v in vectors]


@pytest.mark.parametrize("i,j", [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)])
def test_lambda_rotates_into_j(i, j):
    a, b = 0.7 + 0.2j, -1.1 + 0.4j
    v = np.zeros(3, complex)
    v[i - 1], v[j - 1] = a, b
    out = lambda_ij(i, j, a, b).transform_vector(v)
    want = np.zeros(3, complex)
    want[j - 1] = np.sqrt(a * a + b * b)
    np.testing.assert_allclose(out, want, atol=1e-14)


def test_lambda_identity_for_zero_a():
    assert np.array_equal(lambda_ij(1, 2, 0, 3).matrix, np.eye(2))


def test_lambda_degenerate():
    with pytest.raises(DegenerateRotation):
        lambda_ij(1, 2, 1, 1j)


def test_single_vector_goes_to_sigma3():
    T, a1 = reduce_single([1, 1j, 1])
    np.testing.assert_allclose(a1, [0, 0, 1], atol=1e-14)
    assert is_hermitian(pauli_matrix(a1), 1e-12)


def test_null_vector_refused():
    with pytest.raises(NotReducible) as exc:
        reduce_single([1, 1j, 0])
    assert exc.value.condition == "a^2>0"


def test_negative_square_refused():
    with pytest.raises(NotReducible):
        reduce_single([1j, 0, 0])


def test_pair_needs_real_product():
    # a^2 = 1 and (a x b)^2 > 0 can hold while a.b is complex: the pair is not reducible
    a = np.array([1, 0, 0], complex)
    b = np.array([1j, 1, 0], complex)
    assert dot(cross(a, b), cross(a, b)).real > 0
    with pytest.raises(NotReducible) as exc:
        reduce_pair(a, b)
    assert exc.value.condition == "a.b real"
    # and no similarity can do it: a.b is invariant while real vectors have real products
    rng = np.random.default_rng(0)
    a2, b2 = complexify(rng, [a, b])
    assert abs(dot(a2, b2) - dot(a, b)) < 1e-12


def test_parallel_pair():
    T, a1, b1 = reduce_pair([1, 1j, 1], [2, 2j, 2])
    np.testing.assert_allclose(b1, 2 * a1, atol=1e-13)


def test_triple_with_parallel_second_vector():
    rng = np.random.default_rng(3)
    a, c = rng.normal(size=3), rng.normal(size=3)
    va, vc = complexify(rng, [a, c])
    T, a1, b1, c1 = reduce_triple(va, 3 * va, vc)
    for v in (a1, b1, c1):
        assert np.abs(np.imag(v)).max() < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3])
def test_reduce_random_hidden_real_vectors(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        real = [rng.normal(size=3) for _ in range(n)]
        vecs = complexify(rng, real)
        out = reduce(vecs)
        for v, r in zip(out[1:], real):
            assert np.abs(np.imag(v)).max() <= 1e-9 * max(1, np.abs(v).max())
            # squares are similarity invariants
            assert abs(dot(v, v) - dot(r, r)) <= 1e-9 * max(1, dot(r, r))


def test_hermitian_representative_oracle():
    assert hermitian_representative_exists(np.array([[1, 5], [0, 2]]))
    assert not hermitian_representative_exists(np.array([[1, 1], [0, 1]]))
    assert not hermitian_representative_exists(pauli_matrix([1j, 0, 0]))


def test_then_composes_in_order():
    A = lambda_ij(1, 2, 0.3, 0.9)
    B = lambda_ij(2, 3, 0.2j, 1.0)
    M = pauli_matrix([0.1, 0.2j, 0.3])
    np.testing.assert_allclose(A.then(B).conjugate(M), B.conjugate(A.conjugate(M)), atol=1e-14)


comp = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(comp, min_size=3, max_size=3))
def test_single_reduction_decision_matches_invariant(a):
    a = np.array(a)
    sq = dot(a, a)
    scale = max(1.0, float(np.sum(np.abs(a) ** 2)))
    try:
        T, a1 = reduce_single(a)
    except (NotReducible, ValueError):
        assert not (abs(sq.imag) <= 1e-12 * scale and sq.real > 1e-12 * scale) or not np.any(a)
        return
    assert is_hermitian(pauli_matrix(a1), 1e-9)
    assert abs(dot(a1, a1) - sq) <= 1e-9 * scale
