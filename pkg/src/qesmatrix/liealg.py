"""The o(2,2) = sl(2) + sl(2) realization by first-order matrix differential operators.

Builds the generator triples Q, R, T for a given ``m`` and checks, with exact
arithmetic, the commutation tables, the mutual commutativity of T and R, the
Casimir values and the anticommutation identities of the R triple.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from sympy.polys.domains import QQ_I

from .opalg import (
    ID, IMAG, SIGMA1, SIGMA2, SIGMA3, S0, S_MINUS, S_PLUS,
    DiffOp, MatrixPoly, anticommutator, commutator, compose, exact,
)

LABELS = ("-", "0", "+")


@dataclass(frozen=True)
class GeneratorSet:
    m: int
    Q: tuple[DiffOp, DiffOp, DiffOp]
    R: tuple[DiffOp, DiffOp, DiffOp]
    T: tuple[DiffOp, DiffOp, DiffOp]

    def triple(self, name: str) -> tuple[DiffOp, DiffOp, DiffOp]:
        return {"Q": self.Q, "R": self.R, "T": self.T}[name]


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class AlgebraReport:
    m: int
    checks: list[Check] = field(default_factory=list)
    structure_constants: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def extend(self, other: AlgebraReport) -> AlgebraReport:
        self.checks.extend(other.checks)
        self.structure_constants.update(other.structure_constants)
        return self

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "structure_constants": {
                k: {lab: str(v) for lab, v in row.items()}
                for k, row in self.structure_constants.items()
            },
        }


def _mult(m) -> DiffOp:
    return DiffOp.mult(m)


def _xpoly(*coeffs) -> MatrixPoly:
    """MatrixPoly from Mat2 coefficients of 1, x, x^2, ..."""
    return MatrixPoly(coeffs)


def build_generators(m: int) -> GeneratorSet:
    if not isinstance(m, int) or m < 2:
        raise ValueError(f"m must be an integer >= 2, got {m!r}")
    half = exact(Fraction(m - 1, 2))
    mm1 = exact(m - 1)
    zero = ID * exact(0)

    Qm = DiffOp.d()
    Q0 = DiffOp([MatrixPoly.const(S0 - ID * half), _xpoly(zero, ID)])
    Qp = DiffOp([_xpoly(S_PLUS, S0 * exact(2) - ID * mm1), _xpoly(zero, zero, ID)])

    Rm = _mult(S_MINUS)
    R0 = _mult(_xpoly(S0, S_MINUS))
    Rp = _mult(_xpoly(S_PLUS, S0 * exact(2), S_MINUS))

    Q = (Qm, Q0, Qp)
    R = (Rm, R0, Rp)
    T = tuple(q - r for q, r in zip(Q, R))
    return GeneratorSet(m, Q, R, T)


def quadratic_forms(m: int) -> dict[str, DiffOp]:
    """The twelve second-order forms A0..A2, B0..B2, C1..C3, D1..D3."""
    if m < 2:
        raise ValueError("m must be >= 2")
    z = ID * exact(0)
    c = exact
    i_s2 = SIGMA2 * IMAG
    d2, d1 = DiffOp.d(2), DiffOp.d()

    def mp(*coeffs):
        return MatrixPoly(coeffs)

    def op(c0=(), c1=(), c2=()):
        return DiffOp([mp(*c0), mp(*c1), mp(*c2)])

    forms = {
        "A0": d2,
        "A1": op(c2=(z, ID)),
        "A2": op(c0=(SIGMA3 * c(m - 1),), c2=(z, z, ID)),
        "B0": d1,
        "B1": op(c0=(SIGMA3 * c(Fraction(1, 2)),), c1=(z, ID)),
        "B2": op(c0=(SIGMA1, SIGMA3 - ID * c(m - 1)), c1=(z, z, ID)),
        "C1": op(c0=(SIGMA3 * c(Fraction(m, 2)),), c1=(SIGMA1,)),
        "C2": op(c0=(SIGMA3 * c(Fraction(m, 2)),), c1=(i_s2,)),
        "C3": op(c1=(SIGMA3,)),
    }
    d_zero = (SIGMA1 * c(4 * m - 4), ID * c(3 * m - m * m - 3) + SIGMA3 * c(2 * m - 3))
    forms["D1"] = op(c0=d_zero, c1=(z, SIGMA1 * c(-2)), c2=(z, z, z, ID))
    forms["D2"] = op(c0=d_zero, c1=(z, i_s2 * c(-2)), c2=(z, z, z, ID))
    forms["D3"] = op(c0=(SIGMA3 * c(1 - 2 * m),), c1=(z, SIGMA3 * c(2)))
    return forms


# -- linear decomposition over a triple ------------------------------------

def _flatten(op: DiffOp, order: int, degree: int) -> list:
    out = []
    for k in range(order + 1):
        coeffs = op.coefficient(k).coeffs
        for n in range(degree + 1):
            m = coeffs[n] if n < len(coeffs) else None
            out.extend(m.entries() if m is not None else (QQ_I(0, 0),) * 4)
    return out


def decompose(target: DiffOp, basis) -> list | None:
    """Exact coefficients c with ``target = sum c_i basis_i``, or None."""
    from .invariant import solve_exact

    ops = list(basis) + [target]
    order = max(o.order for o in ops)
    degree = max((c.degree for o in ops for c in o.coeffs), default=0)
    cols = [_flatten(o, order, degree) for o in ops]
    A = [list(row) for row in zip(*cols[:-1])]
    b = cols[-1]
    return solve_exact(A, b)


def structure_constants(triple) -> dict:
    """``[X_a, X_b] = sum_c f_ab^c X_c`` read off by exact decomposition."""
    table = {}
    for i in range(3):
        for j in range(i + 1, 3):
            comm = commutator(triple[i], triple[j])
            coeffs = decompose(comm, triple)
            table[(LABELS[i], LABELS[j])] = coeffs
    return table


def verify_sl2_pair(g: GeneratorSet) -> AlgebraReport:
    """Check that T and R close sl(2) with the Q structure constants and commute."""
    rep = AlgebraReport(g.m)
    ref = structure_constants(g.Q)
    for key, coeffs in ref.items():
        rep.checks.append(Check(f"Q closes [Q{key[0]},Q{key[1]}]", coeffs is not None))
    rep.structure_constants = {
        f"[{a},{b}]": dict(zip(LABELS, c)) for (a, b), c in ref.items() if c is not None
    }
    for name in ("T", "R"):
        triple = g.triple(name)
        for (a, b), coeffs in ref.items():
            i, j = LABELS.index(a), LABELS.index(b)
            comm = commutator(triple[i], triple[j])
            if coeffs is None:
                rep.checks.append(Check(f"[{name}{a},{name}{b}]", False, "no Q reference"))
                continue
            expected = DiffOp()
            for c, X in zip(coeffs, triple):
                if c:
                    expected = expected + X * c
            ok = comm == expected
            rep.checks.append(Check(
                f"[{name}{a},{name}{b}]", ok,
                "" if ok else f"got {comm}, expected {expected}",
            ))
        for i in range(3):
            comm = commutator(triple[i], triple[i])
            rep.checks.append(Check(f"[{name}{LABELS[i]},{name}{LABELS[i]}]", comm.is_zero()))
    for a in range(3):
        for b in range(3):
            comm = commutator(g.T[a], g.R[b])
            rep.checks.append(Check(
                f"[T{LABELS[a]},R{LABELS[b]}]=0", comm.is_zero(),
                "" if comm.is_zero() else f"nonzero: {comm}",
            ))
    for a in range(3):
        rep.checks.append(Check(f"T{LABELS[a]}+R{LABELS[a]}=Q{LABELS[a]}", g.T[a] + g.R[a] == g.Q[a]))
    return rep


def _scalar_multiple(op: DiffOp):
    """Return s if ``op`` is multiplication by s*I, else None."""
    if op.is_zero():
        return QQ_I(0, 0)
    if op.order != 0 or op.coeffs[0].degree != 0:
        return None
    m = op.coeffs[0].coeffs[0]
    return m.a if m.is_scalar() else None


def casimirs(g: GeneratorSet):
    """Values (c1, k2) with ``T0^2 - T+T- - T0 = c1 I`` and ``R0^2 - R+R- - R0 = k2 I``.

    Raises ValueError if either is not a multiple of the identity.
    """
    out = []
    for name in ("T", "R"):
        m_, z, p = g.triple(name)
        cas = compose(z, z) - compose(p, m_) - z
        s = _scalar_multiple(cas)
        if s is None:
            raise ValueError(f"Casimir of {name} is not a multiple of I: {cas}")
        out.append(s)
    return tuple(out)


def verify_casimirs(g: GeneratorSet) -> AlgebraReport:
    rep = AlgebraReport(g.m)
    expected = (exact(Fraction(g.m * g.m - 1, 4)), exact(Fraction(3, 4)))
    try:
        c1, k2 = casimirs(g)
    except ValueError as exc:
        rep.checks.append(Check("casimirs scalar", False, str(exc)))
        return rep
    rep.checks.append(Check("C1=(m^2-1)/4 I", c1 == expected[0], f"C1={c1}"))
    rep.checks.append(Check("K2=3/4 I", k2 == expected[1], f"K2={k2}"))
    return rep


def verify_anticommutation_relations(g: GeneratorSet) -> AlgebraReport:
    """The nine quadratic identities obeyed by the R triple (superalgebra structure)."""
    Rm, R0, Rp = g.R
    half = exact(Fraction(1, 2))
    one = DiffOp.identity()
    zero = DiffOp()
    cases = [
        ("R-^2=0", compose(Rm, Rm), zero),
        ("R0^2=1/4", compose(R0, R0), one * exact(Fraction(1, 4))),
        ("R+^2=0", compose(Rp, Rp), zero),
        ("{R-,R0}=0", anticommutator(Rm, R0), zero),
        ("{R+,R0}=0", anticommutator(Rp, R0), zero),
        ("{R-,R+}=-1", anticommutator(Rm, Rp), -one),
        ("R-R0=R-/2", compose(Rm, R0), Rm * half),
        ("R0R+=R+/2", compose(R0, Rp), Rp * half),
        ("R-R+=R0-1/2", compose(Rm, Rp), R0 - one * half),
    ]
    rep = AlgebraReport(g.m)
    for name, got, want in cases:
        ok = got == want
        rep.checks.append(Check(name, ok, "" if ok else f"got {got}"))
    return rep


def verify_all(m: int) -> AlgebraReport:
    g = build_generators(m)
    rep = verify_sl2_pair(g)
    rep.extend(verify_casimirs(g))
    rep.extend(verify_anticommutation_relations(g))
    return rep
