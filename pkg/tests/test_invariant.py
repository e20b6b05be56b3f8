"""Invariant polynomial space and restriction matrices."""
import numpy as np
import pytest

from qesmatrix.gauge import QESParams, build_hamiltonian
from qesmatrix.invariant import (NotInSpan, build_basis, expand_in_basis, invariance_report, rank,
                                 restrict, spectrum)
from qesmatrix.liealg import quadratic_forms
from qesmatrix.opalg import DiffOp, VectorPoly, exact, to_complex


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_basis_dimension(m):
    b = build_basis(m)
    assert b.dim == 2 * m
    assert rank(b) == 2 * m


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_quadratic_forms_preserve_the_space(m):
    b = build_basis(m)
    for name, H in quadratic_forms(m).items():
        assert all(invariance_report(H, b)), name


def test_x_cubed_leaves_the_space():
    b = build_basis(2)
    with pytest.raises(NotInSpan):
        expand_in_basis(VectorPoly.monomial(3, 1), b)


def test_multiplication_by_x_is_not_invariant():
    b = build_basis(3)
    assert not all(invariance_report(DiffOp.x(), b))


def test_expansion_round_trip():
    b = build_basis(3)
    v = b[0] * exact(2) + b[4] * exact(0, 1)
    coeffs = expand_in_basis(v, b)
    assert coeffs[0] == exact(2) and coeffs[4] == exact(0, 1)
    assert sum(1 for c in coeffs if c != exact(0)) == 2


def test_restriction_convention():
    # H r_j = sum_i M[i][j] r_i
    p = QESParams(alpha0=1, beta2=1, m=2)
    H = build_hamiltonian(p)
    b = build_basis(2)
    M = restrict(H, b)
    from qesmatrix.opalg import apply
    for j, r in enumerate(b.vectors):
        acc = VectorPoly()
        for i, ri in enumerate(b.vectors):
            acc = acc + ri * M[i, j]
        assert acc == apply(H, r)


def test_example2_matrix_frozen():
    p = QESParams(alpha1=1, beta2=-1, beta0=0.5, m=2)
    M = restrict(build_hamiltonian(p), build_basis(2))
    want = [["0", "0", "0", "3"], ["-1/2", "0", "1", "0"], ["0", "2", "0", "4"], ["0", "0", "1", "0"]]
    assert [[str(c) for c in row] for row in M.entries] == want


def test_spectrum_sorted_and_checked():
    A = np.array([[0, 6, 0, -6], [3, 0, -3, 0], [0, -6, 0, -6], [0, 0, -4, 0]], dtype=float)
    ev = spectrum(A)
    np.testing.assert_allclose(ev.real, [-6, -np.sqrt(24), np.sqrt(24), 6], atol=1e-12)
    assert np.all(np.diff(ev.real) >= 0)


def test_basis_requires_integer_m():
    with pytest.raises(ValueError):
        build_basis(1)


def test_restriction_is_linear():
    forms = quadratic_forms(3)
    b = build_basis(3)
    a, c = exact(2, 1), exact(-1, 3)
    lhs = restrict(forms["A1"] * a + forms["B2"] * c, b).to_numpy()
    rhs = to_complex(a) * restrict(forms["A1"], b).to_numpy() + to_complex(c) * restrict(forms["B2"], b).to_numpy()
    np.testing.assert_allclose(lhs, rhs, atol=1e-14)


def test_spectrum_invariant_under_similarity(rng):
    M = restrict(build_hamiltonian(QESParams(alpha0=1, alpha2=2, beta1=0.5, gamma3=1, m=3)),
                 build_basis(3)).to_numpy()
    P = rng.normal(size=M.shape) + 1j * rng.normal(size=M.shape)
    perm = np.eye(len(M))[rng.permutation(len(M))]
    base = spectrum(M)
    for Q in (P, perm):
        other = spectrum(np.linalg.solve(Q, M @ Q))
        np.testing.assert_allclose(np.sort_complex(other), np.sort_complex(base), atol=1e-10)
