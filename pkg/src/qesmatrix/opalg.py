"""Exact algebra of 2x2 matrix polynomials and differential operators in one variable.

Scalars are either Gaussian rationals (``QQ_I`` elements from sympy, exact mode)
or Python ``complex`` (float mode).  Every container is immutable and kept in
canonical form, so structural equality ``==`` is mathematical equality.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np
from sympy.polys.domains import QQ_I

__all__ = [
    "exact", "to_complex", "ZERO", "ONE", "IMAG",
    "Mat2", "ID", "SIGMA1", "SIGMA2", "SIGMA3", "S0", "S_PLUS", "S_MINUS",
    "MatrixPoly", "VectorPoly", "DiffOp",
    "compose", "commutator", "anticommutator", "apply",
    "E1", "E2",
]


def exact(re=0, im=0):
    """Gaussian rational ``re + i*im``; floats are converted exactly."""
    if isinstance(re, complex):
        re, im = re.real, re.imag + im
    return QQ_I(_rat(re), _rat(im))


def _rat(v):
    if isinstance(v, Rational):
        return Fraction(v.numerator, v.denominator)
    if isinstance(v, float):
        return Fraction(v)
    # gmpy2.mpq and friends
    return Fraction(int(v.numerator), int(v.denominator))


def to_complex(s) -> complex:
    if isinstance(s, (complex, float, int)):
        return complex(s)
    return complex(float(s.x), float(s.y))


ZERO = QQ_I(0, 0)
ONE = QQ_I(1, 0)
IMAG = QQ_I(0, 1)


def _is_zero(s) -> bool:
    return not s


def _zero_like(s):
    return ZERO if not isinstance(s, (complex, float, int)) else 0j


@dataclass(frozen=True)
class Mat2:
    """2x2 matrix, row-major entries ``[[a, b], [c, d]]``."""

    a: object
    b: object
    c: object
    d: object

    @classmethod
    def scalar(cls, s, zero=ZERO):
        return cls(s, zero, zero, s)

    def __add__(self, o: Mat2) -> Mat2:
        return Mat2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o: Mat2) -> Mat2:
        return Mat2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __neg__(self) -> Mat2:
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, o):
        if isinstance(o, Mat2):
            return Mat2(
                self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d,
            )
        return Mat2(self.a * o, self.b * o, self.c * o, self.d * o)

    def __rmul__(self, s):
        return Mat2(s * self.a, s * self.b, s * self.c, s * self.d)

    def is_zero(self) -> bool:
        return all(_is_zero(e) for e in (self.a, self.b, self.c, self.d))

    def trace(self):
        return self.a + self.d

    def det(self):
        return self.a * self.d - self.b * self.c

    def is_scalar(self) -> bool:
        return _is_zero(self.b) and _is_zero(self.c) and self.a == self.d

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def to_numpy(self) -> np.ndarray:
        return np.array([[to_complex(self.a), to_complex(self.b)],
                         [to_complex(self.c), to_complex(self.d)]])

    def to_float(self) -> Mat2:
        return Mat2(*(to_complex(e) for e in self.entries()))

    def __repr__(self):
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


ID = Mat2(ONE, ZERO, ZERO, ONE)
SIGMA1 = Mat2(ZERO, ONE, ONE, ZERO)
SIGMA2 = Mat2(ZERO, -IMAG, IMAG, ZERO)
SIGMA3 = Mat2(ONE, ZERO, ZERO, -ONE)
_HALF = QQ_I(Fraction(1, 2), 0)
S0 = SIGMA3 * _HALF
S_PLUS = (SIGMA2 * IMAG + SIGMA1) * _HALF
S_MINUS = (SIGMA2 * IMAG - SIGMA1) * _HALF


def _mat_zero(like: Mat2) -> Mat2:
    z = _zero_like(like.a)
    return Mat2(z, z, z, z)


def _trim(seq: Sequence, is_zero) -> tuple:
    n = len(seq)
    while n and is_zero(seq[n - 1]):
        n -= 1
    return tuple(seq[:n])


class MatrixPoly:
    """Polynomial in x with 2x2 matrix coefficients, ``coeffs[k]`` multiplies x^k."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Mat2] = ()):
        self.coeffs = _trim(list(coeffs), Mat2.is_zero)

    @classmethod
    def const(cls, m: Mat2) -> MatrixPoly:
        return cls([m])

    @classmethod
    def monomial(cls, m: Mat2, k: int) -> MatrixPoly:
        return cls([_mat_zero(m)] * k + [m])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, o):
        return isinstance(o, MatrixPoly) and self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, o: MatrixPoly) -> MatrixPoly:
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        return MatrixPoly([a[k] + b[k] if k < len(b) else a[k] for k in range(len(a))])

    def __sub__(self, o: MatrixPoly) -> MatrixPoly:
        return self + (-o)

    def __neg__(self) -> MatrixPoly:
        return MatrixPoly([-c for c in self.coeffs])

    def __mul__(self, o):
        if isinstance(o, MatrixPoly):
            if not self.coeffs or not o.coeffs:
                return MatrixPoly()
            out = [None] * (len(self.coeffs) + len(o.coeffs) - 1)
            for i, p in enumerate(self.coeffs):
                for j, q in enumerate(o.coeffs):
                    t = p * q
                    out[i + j] = t if out[i + j] is None else out[i + j] + t
            return MatrixPoly(out)
        if isinstance(o, Mat2):
            return MatrixPoly([c * o for c in self.coeffs])
        return MatrixPoly([c * o for c in self.coeffs])

    def __rmul__(self, o):
        if isinstance(o, Mat2):
            return MatrixPoly([o * c for c in self.coeffs])
        return MatrixPoly([o * c for c in self.coeffs])

    def derivative(self, k: int = 1) -> MatrixPoly:
        c = self.coeffs
        for _ in range(k):
            c = [c[n] * n for n in range(1, len(c))]
        return MatrixPoly(c)

    def to_numpy(self) -> np.ndarray:
        """Coefficient array of shape ``(degree+1, 2, 2)``."""
        if not self.coeffs:
            return np.zeros((1, 2, 2), complex)
        return np.array([c.to_numpy() for c in self.coeffs])

    def to_float(self) -> MatrixPoly:
        return MatrixPoly([c.to_float() for c in self.coeffs])

    def __call__(self, x):
        """Numeric evaluation, returns a complex 2x2 array (or stack for array x)."""
        arr = self.to_numpy()
        x = np.asarray(x, dtype=complex)
        out = np.zeros(x.shape + (2, 2), complex)
        for c in arr[::-1]:
            out = out * x[..., None, None] + c
        return out

    def __repr__(self):
        return f"MatrixPoly({list(self.coeffs)})"


class VectorPoly:
    """Two-component polynomial vector ``p1(x) e1 + p2(x) e2``."""

    __slots__ = ("p1", "p2")

    def __init__(self, p1: Iterable = (), p2: Iterable = ()):
        self.p1 = _trim(list(p1), _is_zero)
        self.p2 = _trim(list(p2), _is_zero)

    @classmethod
    def monomial(cls, k: int, component: int, coeff=ONE) -> VectorPoly:
        z = _zero_like(coeff)
        p = [z] * k + [coeff]
        return cls(p, ()) if component == 1 else cls((), p)

    def __eq__(self, o):
        return isinstance(o, VectorPoly) and self.p1 == o.p1 and self.p2 == o.p2

    def __hash__(self):
        return hash((self.p1, self.p2))

    def is_zero(self) -> bool:
        return not self.p1 and not self.p2

    @property
    def degree(self) -> int:
        return max(len(self.p1), len(self.p2)) - 1

    @staticmethod
    def _add(a, b):
        if len(a) < len(b):
            a, b = b, a
        return [a[k] + b[k] if k < len(b) else a[k] for k in range(len(a))]

    def __add__(self, o: VectorPoly) -> VectorPoly:
        return VectorPoly(self._add(self.p1, o.p1), self._add(self.p2, o.p2))

    def __sub__(self, o: VectorPoly) -> VectorPoly:
        return self + (-o)

    def __neg__(self) -> VectorPoly:
        return VectorPoly([-c for c in self.p1], [-c for c in self.p2])

    def __mul__(self, s) -> VectorPoly:
        return VectorPoly([c * s for c in self.p1], [c * s for c in self.p2])

    __rmul__ = __mul__

    def derivative(self, k: int = 1) -> VectorPoly:
        p1, p2 = list(self.p1), list(self.p2)
        for _ in range(k):
            p1 = [p1[n] * n for n in range(1, len(p1))]
            p2 = [p2[n] * n for n in range(1, len(p2))]
        return VectorPoly(p1, p2)

    def left_mul(self, m: MatrixPoly) -> VectorPoly:
        """The product ``m(x) v(x)``."""
        if m.is_zero() or self.is_zero():
            return VectorPoly()
        n = m.degree + self.degree + 1
        sample = m.coeffs[0].a
        z = _zero_like(sample)
        o1, o2 = [z] * n, [z] * n
        for i, c in enumerate(m.coeffs):
            for j, v in enumerate(self.p1):
                o1[i + j] = o1[i + j] + c.a * v
                o2[i + j] = o2[i + j] + c.c * v
            for j, v in enumerate(self.p2):
                o1[i + j] = o1[i + j] + c.b * v
                o2[i + j] = o2[i + j] + c.d * v
        return VectorPoly(o1, o2)

    def coefficient_vector(self, length: int) -> list:
        """Flattened ``[p1_0..p1_{L-1}, p2_0..p2_{L-1}]``, zero padded."""
        z = ZERO if not (self.p1 + self.p2) else _zero_like((self.p1 + self.p2)[0])
        p1 = list(self.p1) + [z] * (length - len(self.p1))
        p2 = list(self.p2) + [z] * (length - len(self.p2))
        if len(p1) > length or len(p2) > length:
            raise ValueError("polynomial longer than requested length")
        return p1 + p2

    def __call__(self, x):
        """Numeric evaluation; returns array of shape ``x.shape + (2,)``."""
        x = np.asarray(x, dtype=complex)
        out = np.zeros(x.shape + (2,), complex)
        for comp, p in enumerate((self.p1, self.p2)):
            acc = np.zeros(x.shape, complex)
            for c in reversed(p):
                acc = acc * x + to_complex(c)
            out[..., comp] = acc
        return out

    def __repr__(self):
        return f"VectorPoly({list(self.p1)}, {list(self.p2)})"


E1 = VectorPoly([ONE], [])
E2 = VectorPoly([], [ONE])


class DiffOp:
    """Differential operator ``sum_k coeffs[k](x) d^k/dx^k`` with MatrixPoly coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[MatrixPoly] = ()):
        coeffs = [c if isinstance(c, MatrixPoly) else _as_matrix_poly(c) for c in coeffs]
        self.coeffs = _trim(coeffs, MatrixPoly.is_zero)

    @classmethod
    def mult(cls, m) -> DiffOp:
        """Multiplication operator by a Mat2 or MatrixPoly."""
        return cls([_as_matrix_poly(m)])

    @classmethod
    def d(cls, order: int = 1) -> DiffOp:
        return cls([MatrixPoly()] * order + [MatrixPoly.const(ID)])

    @classmethod
    def identity(cls) -> DiffOp:
        return cls.mult(ID)

    @classmethod
    def x(cls, k: int = 1) -> DiffOp:
        return cls.mult(MatrixPoly.monomial(ID, k))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> MatrixPoly:
        return self.coeffs[k] if k < len(self.coeffs) else MatrixPoly()

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, o):
        return isinstance(o, DiffOp) and self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, o: DiffOp) -> DiffOp:
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        return DiffOp([a[k] + b[k] if k < len(b) else a[k] for k in range(len(a))])

    def __sub__(self, o: DiffOp) -> DiffOp:
        return self + (-o)

    def __neg__(self) -> DiffOp:
        return DiffOp([-c for c in self.coeffs])

    def __mul__(self, o):
        if isinstance(o, DiffOp):
            return compose(self, o)
        return DiffOp([c * o for c in self.coeffs])

    def __rmul__(self, s):
        return DiffOp([s * c for c in self.coeffs])

    def __call__(self, v: VectorPoly) -> VectorPoly:
        return apply(self, v)

    def to_float(self) -> DiffOp:
        return DiffOp([c.to_float() for c in self.coeffs])

    def __repr__(self):
        return f"DiffOp({list(self.coeffs)})"


def _as_matrix_poly(m) -> MatrixPoly:
    if isinstance(m, MatrixPoly):
        return m
    if isinstance(m, Mat2):
        return MatrixPoly.const(m)
    return MatrixPoly.const(Mat2.scalar(m, _zero_like(m)))


def compose(p: DiffOp, q: DiffOp) -> DiffOp:
    """Operator product ``p q`` via the Leibniz rule.

    ``(P d^i)(Q d^j) = sum_l C(i,l) P Q^(l) d^(i-l+j)``.
    """
    if p.is_zero() or q.is_zero():
        return DiffOp()
    out: list[MatrixPoly] = [MatrixPoly()] * (p.order + q.order + 1)
    for i, P in enumerate(p.coeffs):
        if P.is_zero():
            continue
        for j, Q in enumerate(q.coeffs):
            if Q.is_zero():
                continue
            for l in range(i + 1):
                dQ = Q.derivative(l)
                if dQ.is_zero():
                    break
                term = P * dQ
                if l and comb(i, l) != 1:
                    term = term * comb(i, l)
                k = i - l + j
                out[k] = out[k] + term
    return DiffOp(out)


def commutator(p: DiffOp, q: DiffOp) -> DiffOp:
    return compose(p, q) - compose(q, p)


def anticommutator(p: DiffOp, q: DiffOp) -> DiffOp:
    return compose(p, q) + compose(q, p)


def apply(p: DiffOp, v: VectorPoly) -> VectorPoly:
    out = VectorPoly()
    for k, c in enumerate(p.coeffs):
        dv = v.derivative(k)
        if dv.is_zero():
            break
        out = out + dv.left_mul(c)
    return out
