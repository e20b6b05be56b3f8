"""Similarity transformations that make Pauli-vector combinations Hermitian.

A traceless matrix ``a . sigma`` with complex ``a`` is conjugated by the
two-parameter matrices ``Lambda_ij(a, b) = 1 + eps_ijk t i sigma_k`` which act
on the Pauli components as complex rotations in the (i, j) plane.  Chaining
two or three of them brings one, two or three vectors to real form whenever
the invariant conditions (real positive squares, real mutual products) hold.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

PAIR_ORDER = ((1, 2), (1, 3), (2, 3))


class NotReducible(ValueError):
    """The vectors cannot be brought to real form; ``condition`` names the failing test."""

    def __init__(self, condition: str, value=None):
        super().__init__(f"condition {condition} fails (value {value})")
        self.condition = condition
        self.value = value


class DegenerateRotation(ValueError):
    """``a^2 + b^2 = 0`` with ``a != 0``: the rotation is undefined for this index pair."""


def dot(a: Sequence, b: Sequence):
    """Bilinear (not sesquilinear) product ``sum a_i b_i``; works for any scalar type."""
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a: Sequence, b: Sequence):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def pauli_matrix(v: Sequence) -> np.ndarray:
    """``v . sigma`` as a 2x2 complex array."""
    return np.einsum("i,ijk->jk", np.asarray(v, dtype=complex), PAULI)


def pauli_components(A) -> np.ndarray:
    """Components ``tr(A sigma_i)/2`` of the traceless part of ``A``."""
    A = np.asarray(A, dtype=complex)
    return np.einsum("...jk,ikj->...i", A, PAULI) / 2


def is_hermitian(A, tol: float = 1e-10) -> bool:
    A = np.asarray(A, dtype=complex)
    return bool(np.abs(A - A.conj().swapaxes(-1, -2)).max() <= tol * max(1.0, np.abs(A).max()))


def _levi_civita(i: int, j: int, k: int) -> int:
    return int(round(np.linalg.det(np.eye(3)[[i - 1, j - 1, k - 1]])))


@dataclass(frozen=True)
class SimilarityTransform:
    """An invertible 2x2 matrix ``L`` acting by ``A -> L^{-1} A L``."""

    matrix: np.ndarray

    @classmethod
    def identity(cls) -> SimilarityTransform:
        return cls(IDENTITY.copy())

    @property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)

    def conjugate(self, A) -> np.ndarray:
        """``L^{-1} A L``; broadcasts over leading axes of ``A``."""
        return self.inverse @ np.asarray(A, dtype=complex) @ self.matrix

    def then(self, other: SimilarityTransform) -> SimilarityTransform:
        """Apply ``self`` first and ``other`` second: the product ``L_self L_other``."""
        return SimilarityTransform(self.matrix @ other.matrix)

    def transform_vector(self, v: Sequence) -> np.ndarray:
        return pauli_components(self.conjugate(pauli_matrix(v)))

    def is_unitary_up_to_scale(self, tol: float = 1e-10) -> bool:
        g = self.matrix.conj().T @ self.matrix
        return bool(np.abs(g - g[0, 0] * IDENTITY).max() <= tol * abs(g[0, 0]))


def lambda_ij(i: int, j: int, a: complex, b: complex) -> SimilarityTransform:
    """``1 + eps_ijk (sqrt(a^2+b^2) - b)/a * i sigma_k`` (identity when a = 0).

    Conjugation by the result sends ``a sigma_i + b sigma_j`` to
    ``sqrt(a^2+b^2) sigma_j``.  Indices are 1-based.
    """
    if {i, j} not in ({1, 2}, {1, 3}, {2, 3}):
        raise ValueError(f"invalid index pair ({i}, {j})")
    a, b = complex(a), complex(b)
    if a == 0:
        return SimilarityTransform.identity()
    k = 6 - i - j
    r = np.sqrt(a * a + b * b)
    if r == 0:
        raise DegenerateRotation(f"a^2 + b^2 = 0 for pair ({i}, {j}); use another index pair")
    # the two algebraically equal forms a/(r+b) and (r-b)/a; pick the one without cancellation
    t = a / (r + b) if abs(r + b) >= abs(r - b) else (r - b) / a
    return SimilarityTransform(IDENTITY + _levi_civita(i, j, k) * t * 1j * PAULI[k - 1])


def _fixed_rotation(src: int, dst: int) -> SimilarityTransform:
    """Unitary (up to scale) map sending ``sigma_src`` to ``sigma_dst``."""
    if src == dst:
        return SimilarityTransform.identity()
    return lambda_ij(src, dst, 1.0, 0.0)


def _positive(z: complex, scale: float, tol: float) -> bool:
    return abs(z.imag) <= tol * scale and z.real > tol * scale


def _real(z: complex, scale: float, tol: float) -> bool:
    return abs(complex(z).imag) <= tol * scale


def _scale(*vs) -> float:
    return max([1.0] + [float(np.sum(np.abs(np.asarray(v, dtype=complex)) ** 2)) for v in vs])


def reduce_single(a: Sequence, *, tol: float = 1e-12, pair: tuple[int, int] | None = None):
    """Bring ``a . sigma`` to ``sqrt(a^2) sigma_3``.

    Requires ``a^2`` real and positive.  Returns ``(transform, a')``.  The
    first index pair with ``a_i^2 + a_j^2 != 0`` (in the order (1,2), (1,3),
    (2,3)) is used unless ``pair`` is given.
    """
    a = np.asarray(a, dtype=complex)
    if not np.any(a):
        raise ValueError("vector must be nonzero")
    sq = complex(dot(a, a))
    sc = _scale(a)
    if not _positive(sq, sc, tol):
        raise NotReducible("a^2>0", sq)
    if pair is None:
        pair = next(p for p in PAIR_ORDER if abs(a[p[0] - 1] ** 2 + a[p[1] - 1] ** 2) > tol * sc)
    i, j = pair
    k = 6 - i - j
    first = lambda_ij(i, j, a[i - 1], a[j - 1])
    mid = first.transform_vector(a)
    second = lambda_ij(j, k, mid[j - 1], mid[k - 1])
    total = first.then(second).then(_fixed_rotation(k, 3))
    out = total.transform_vector(a)
    return total, _clean(out, sc, tol)


def _clean(v, sc, tol):
    v = np.asarray(v, dtype=complex)
    v = np.where(np.abs(v) <= tol * np.sqrt(sc) * 10, 0, v)
    return v


def _parallel_ratio(a, b, tol):
    """``lam`` with ``b = lam a``, or None."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if np.abs(np.asarray(cross(a, b))).max() > tol * _scale(a, b):
        return None
    idx = int(np.argmax(np.abs(a)))
    return b[idx] / a[idx]


def reduce_pair(a: Sequence, b: Sequence, *, tol: float = 1e-12):
    """Bring ``a`` to the sigma_3 axis and ``b`` into the real (sigma_2, sigma_3) plane.

    Conditions: ``a^2 > 0``, ``a . b`` real, and either ``b`` a real multiple of
    ``a`` or ``(a x b)^2 > 0``.  Returns ``(transform, a', b')``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    sc = _scale(a, b)
    total, a1 = reduce_single(a, tol=tol)
    ab = complex(dot(a, b))
    if not _real(ab, sc, tol):
        raise NotReducible("a.b real", ab)
    lam = _parallel_ratio(a, b, tol)
    if lam is not None:
        if not _real(lam, 1.0, tol):
            raise NotReducible("b real multiple of a", lam)
        return total, a1, _clean(total.transform_vector(b), sc, tol)
    cr = complex(dot(cross(a, b), cross(a, b)))
    if not _positive(cr, sc * sc, tol):
        raise NotReducible("(a x b)^2>0", cr)
    b1 = total.transform_vector(b)
    total = total.then(lambda_ij(1, 2, b1[0], b1[1]))
    return total, _clean(total.transform_vector(a), sc, tol), _clean(total.transform_vector(b), sc, tol)


def reduce_triple(a: Sequence, b: Sequence, c: Sequence, *, tol: float = 1e-12):
    """Make three vectors real at once.

    Beyond the pair conditions this needs ``a . c``, ``b . c`` and the triple
    product ``(a x b) . c`` real.  Returns ``(transform, a', b', c')``.
    """
    a, b, c = (np.asarray(v, dtype=complex) for v in (a, b, c))
    sc = _scale(a, b, c)
    lam = _parallel_ratio(a, b, tol)
    if lam is not None and _real(lam, 1.0, tol) and np.any(c):
        # b carries no new direction; use c as the second vector
        total, a1, c1 = reduce_pair(a, c, tol=tol)
        return total, a1, _clean(total.transform_vector(b), sc, tol), c1
    total, a1, b1 = reduce_pair(a, b, tol=tol)
    for name, val in (("a.c real", dot(a, c)), ("b.c real", dot(b, c)),
                      ("(a x b).c real", dot(cross(a, b), c))):
        if not _real(complex(val), sc ** 1.5, tol):
            raise NotReducible(name, complex(val))
    c1 = _clean(total.transform_vector(c), sc, tol)
    if np.abs(c1.imag).max() > 1e-9 * np.sqrt(sc):
        raise NotReducible("c' real", c1)
    return total, a1, b1, c1


def reduce(vectors: Sequence[Sequence], *, tol: float = 1e-12):
    """Dispatch on the number of vectors (1 to 3)."""
    n = len(vectors)
    if n == 1:
        return reduce_single(vectors[0], tol=tol)
    if n == 2:
        return reduce_pair(*vectors, tol=tol)
    if n == 3:
        return reduce_triple(*vectors, tol=tol)
    raise ValueError("between one and three vectors are supported")


def hermitian_representative_exists(A, tol: float = 1e-9) -> bool:
    """Whether ``A`` is similar to a Hermitian matrix.

    Independent of the rotation machinery: holds iff ``A`` is diagonalizable
    with real eigenvalues.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    scale = max(1.0, np.abs(A).max())
    vals = np.linalg.eigvals(A)
    if np.abs(vals.imag).max() > tol * scale:
        return False
    # repeated eigenvalues must come with a full eigenspace
    for lam in vals:
        mult = int(np.sum(np.abs(vals - lam) <= np.sqrt(tol) * scale))
        if mult > 1:
            rk = np.linalg.matrix_rank(A - lam * np.eye(n), tol=np.sqrt(tol) * scale)
            if n - rk < mult:
                return False
    return True
