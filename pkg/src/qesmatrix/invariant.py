"""The 2m-dimensional invariant space of polynomial vectors and restriction onto it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .opalg import DiffOp, VectorPoly, apply, exact, to_complex


class NotInSpan(ArithmeticError):
    """A vector has no expansion in the invariant basis.

    Raised when an operator does not preserve the space; ``residual`` is the
    component left over after elimination.
    """

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


def _zero(x):
    return not x


def solve_exact(A: Sequence[Sequence], b: Sequence, *, tol: float | None = None):
    """Solve ``A c = b`` for an overdetermined consistent system.

    Plain Gauss-Jordan elimination; exact for Gaussian rationals.  In float
    mode pass ``tol`` (partial pivoting, residual compared against tol).
    Returns the coefficient list, or None if the system is inconsistent.
    Raises ValueError if the columns of A are dependent.
    """
    sol, _ = _eliminate(A, b, tol)
    return sol


def _eliminate(A, b, tol):
    rows = [list(r) + [bv] for r, bv in zip(A, b)]
    ncols = len(A[0]) if A else 0
    is_zero = _zero if tol is None else (lambda v: abs(v) <= tol)
    piv_row = 0
    pivots = []
    for col in range(ncols):
        if tol is None:
            sel = next((r for r in range(piv_row, len(rows)) if not is_zero(rows[r][col])), None)
        else:
            cand = max(range(piv_row, len(rows)), key=lambda r: abs(rows[r][col]), default=None)
            sel = cand if cand is not None and not is_zero(rows[cand][col]) else None
        if sel is None:
            raise ValueError(f"column {col} is linearly dependent on earlier columns")
        rows[piv_row], rows[sel] = rows[sel], rows[piv_row]
        pr = rows[piv_row]
        inv = pr[col] ** -1
        pr[:] = [v * inv for v in pr]
        for r in range(len(rows)):
            if r != piv_row and not is_zero(rows[r][col]):
                f = rows[r][col]
                rows[r] = [a - f * p for a, p in zip(rows[r], pr)]
        pivots.append(piv_row)
        piv_row += 1
    leftover = [rows[r][-1] for r in range(piv_row, len(rows)) if not is_zero(rows[r][-1])]
    if leftover:
        return None, leftover
    return [rows[p][-1] for p in pivots], []


@dataclass(frozen=True)
class InvariantBasis:
    """Ordered basis ``x^j e1`` (j=0..m-2) then ``m x^k e2 - k x^(k-1) e1`` (k=0..m)."""

    m: int
    vectors: tuple[VectorPoly, ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]


def build_basis(m: int) -> InvariantBasis:
    if not isinstance(m, int) or m < 2:
        raise ValueError(f"m must be an integer >= 2, got {m!r}")
    vecs = [VectorPoly.monomial(j, 1) for j in range(m - 1)]
    for k in range(m + 1):
        v = VectorPoly.monomial(k, 2, exact(m))
        if k:
            v = v - VectorPoly.monomial(k - 1, 1, exact(k))
        vecs.append(v)
    basis = InvariantBasis(m, tuple(vecs))
    if rank(basis) != 2 * m:
        raise ArithmeticError("invariant basis vectors are not independent")
    return basis


def _coefficient_matrix(vectors: Sequence[VectorPoly], length: int):
    cols = [v.coefficient_vector(length) for v in vectors]
    return [list(r) for r in zip(*cols)]


def rank(basis: InvariantBasis) -> int:
    """Exact rank of the basis vectors (fraction-based elimination)."""
    length = basis.m + 1
    A = _coefficient_matrix(basis.vectors, length)
    rows = [list(r) for r in A]
    r = 0
    for col in range(len(basis.vectors)):
        sel = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = rows[r][col] ** -1
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * p for a, p in zip(rows[i], rows[r])]
        r += 1
    return r


def _is_exact(v: VectorPoly) -> bool:
    return not any(isinstance(c, complex) for c in v.p1 + v.p2)


def expand_in_basis(v: VectorPoly, b: InvariantBasis, *, tol: float = 1e-9) -> list:
    """Coefficients c with ``v = sum c_i r_i``; raises NotInSpan otherwise.

    Exact for Gaussian-rational input; float input is solved with partial
    pivoting and a residual test at ``tol`` (relative to the largest coefficient).
    """
    if v.is_zero():
        return [exact(0)] * b.dim
    length = max(b.m + 1, v.degree + 1)
    exact_mode = _is_exact(v)
    vecs = b.vectors
    rhs = v.coefficient_vector(length)
    if not exact_mode:
        vecs = [VectorPoly([to_complex(c) for c in w.p1], [to_complex(c) for c in w.p2]) for w in vecs]
        scale = max(abs(c) for c in rhs) or 1.0
        rhs = [c / scale for c in rhs]
    A = _coefficient_matrix(vecs, length)
    sol, leftover = _eliminate(A, rhs, None if exact_mode else tol)
    if sol is None:
        raise NotInSpan(
            f"vector of degree {v.degree} is not in the span of the invariant basis", leftover)
    if not exact_mode:
        sol = [c * scale for c in sol]
    return sol


@dataclass(frozen=True)
class RestrictionMatrix:
    """Matrix of an operator on the invariant space: ``H r_j = sum_i M[i][j] r_i``."""

    entries: tuple[tuple, ...]
    basis: InvariantBasis

    @property
    def dim(self) -> int:
        return len(self.entries)

    def to_numpy(self) -> np.ndarray:
        return np.array([[to_complex(c) for c in row] for row in self.entries])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


def restrict(H: DiffOp, b: InvariantBasis) -> RestrictionMatrix:
    cols = [expand_in_basis(apply(H, r), b) for r in b.vectors]
    n = b.dim
    return RestrictionMatrix(tuple(tuple(cols[j][i] for j in range(n)) for i in range(n)), b)


def invariance_report(H: DiffOp, b: InvariantBasis) -> list[bool]:
    """Per basis vector: does ``H r_j`` stay inside the span?"""
    out = []
    for r in b.vectors:
        try:
            expand_in_basis(apply(H, r), b)
            out.append(True)
        except NotInSpan:
            out.append(False)
    return out


def _sort_key(z: complex):
    return (round(z.real, 12), round(z.imag, 12))


def spectrum(M, *, check_residual: bool = True) -> np.ndarray:
    """Eigenvalues of the restriction matrix, sorted by real then imaginary part.

    Each eigenpair is checked against ``|Mv - lv| <= 1e-9 |M|``.
    """
    A = M.to_numpy() if isinstance(M, RestrictionMatrix) else np.asarray(M, dtype=complex)
    vals, vecs = np.linalg.eig(A)
    if check_residual:
        norm = np.linalg.norm(A, 2) or 1.0
        res = np.linalg.norm(A @ vecs - vecs * vals, axis=0)
        if np.any(res > 1e-9 * norm):
            raise ArithmeticError(f"eigenpair residual too large: {res.max():.3e}")
    order = sorted(range(len(vals)), key=lambda k: _sort_key(vals[k]))
    return vals[order]
