"""The Hermitian QES families: admissibility conditions, closed-form potentials, Lambda.

Each case fixes relations among the parameters under which the potential
becomes Hermitian after conjugation by a case-specific constant matrix.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .gauge import DomainError, GaugeMap, PotentialFn, QESParams, default_anchor, solve_gauge
from .hermitize import IDENTITY, PAULI, DegenerateRotation, SimilarityTransform, lambda_ij

S1, S2, S3 = PAULI


class CaseId(enum.Enum):
    C1 = "1"
    C2 = "2"
    C3 = "3"
    C4_1 = "4.1"
    C4_2 = "4.2"
    C5 = "5"
    C6_1 = "6.1"
    C6_2 = "6.2"

    @classmethod
    def parse(cls, s) -> CaseId:
        if isinstance(s, CaseId):
            return s
        s = str(s).strip().upper().lstrip("C").replace("_", ".")
        for c in cls:
            if c.value == s:
                return c
        raise ValueError(f"unknown case {s!r}")


class ConstraintViolation(ValueError):
    def __init__(self, verdict: Verdict):
        super().__init__(f"case {verdict.case.value}: violated {', '.join(verdict.violated())}")
        self.verdict = verdict


# -- predicates ------------------------------------------------------------------

@dataclass
class Condition:
    name: str
    passed: bool
    value: complex | None = None
    branch: str | None = None


@dataclass
class Verdict:
    case: CaseId
    conditions: list[Condition] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def violated(self) -> list[str]:
        return [c.name for c in self.conditions if not c.passed]

    def to_dict(self) -> dict:
        def enc(z):
            if z is None:
                return None
            z = complex(z)
            return {"re": z.real, "im": z.imag}
        return {"case": self.case.value, "passed": self.passed,
                "conditions": [{"name": c.name, "passed": c.passed, "value": enc(c.value),
                                "branch": c.branch} for c in self.conditions]}


class _Checker:
    def __init__(self, p: QESParams, tol: float):
        self.tol = tol
        vals = [abs(v) for v in p.alpha + p.beta + p.gamma]
        self.scale = max([1.0] + vals)
        self.out: list[Condition] = []

    def _tol(self, power=1):
        return self.tol * self.scale ** power

    def zero(self, z, power=1):
        return abs(complex(z)) <= self._tol(power)

    def real(self, z, power=1):
        return abs(complex(z).imag) <= self._tol(power)

    def imag(self, z, power=1):
        return abs(complex(z).real) <= self._tol(power)

    def pos(self, z, power=1):
        return self.real(z, power) and complex(z).real > self._tol(power)

    def neg(self, z, power=1):
        return self.real(z, power) and complex(z).real < -self._tol(power)

    def add(self, name, ok, value=None):
        self.out.append(Condition(name, bool(ok), None if value is None else complex(value)))

    def either(self, name, left: list[tuple[str, bool]], right: list[tuple[str, bool]]):
        lo = all(ok for _, ok in left)
        ro = all(ok for _, ok in right)
        branch = "left" if lo else ("right" if ro else None)
        label = f"[{' & '.join(n for n, _ in left)}] or [{' & '.join(n for n, _ in right)}]"
        self.out.append(Condition(name or label, lo or ro, None, branch))


def check_constraints(case, p: QESParams, tol: float = 1e-9) -> Verdict:
    """Evaluate every admissibility condition of ``case`` separately."""
    case = CaseId.parse(case)
    c = _Checker(p, tol)
    a0, a1, a2 = p.alpha
    b0, b1, b2 = p.beta
    g1, g2, g3 = p.gamma
    d, G = p.delta, p.gamma_sq
    dd = g1**2 - g2**2

    if case is CaseId.C1:
        for n, v in (("gamma1=0", g1), ("gamma2=0", g2), ("gamma3=0", g3)):
            c.add(n, c.zero(v), v)
        c.either("[beta0,beta1,beta2 real] or [beta2=0 & beta1=2alpha2 & beta0-alpha1 imaginary]",
                 [("beta real", c.real(b0) and c.real(b1) and c.real(b2))],
                 [("beta2=0", c.zero(b2)), ("beta1=2alpha2", c.zero(b1 - 2 * a2)),
                  ("beta0-alpha1 imaginary", c.imag(b0 - a1))])
    elif case is CaseId.C2:
        c.add("beta2=0", c.zero(b2), b2)
        c.add("delta=0", c.zero(d), d)
        c.add("2alpha2 beta1 - beta1^2 real", c.real(2 * a2 * b1 - b1**2, 2), 2 * a2 * b1 - b1**2)
        c.add("2alpha2 beta0 - beta0 beta1 real", c.real(2 * a2 * b0 - b0 * b1, 2), 2 * a2 * b0 - b0 * b1)
        v = 2 * a1 * b0 - 2 * b1 * a0 - b0**2 - G
        c.add("2alpha1 beta0 - 2beta1 alpha0 - beta0^2 - gamma~^2 real", c.real(v, 2), v)
        c.either("[(2alpha2-beta1)^2 gamma~^2 > 0] or [2alpha2-beta1=0]",
                 [("(2alpha2-beta1)^2 gamma~^2>0", c.pos((2 * a2 - b1) ** 2 * G, 4))],
                 [("2alpha2-beta1=0", c.zero(2 * a2 - b1))])
        c.either("[(alpha1-beta0)^2 gamma~^2 > 0] or [alpha1-beta0=0]",
                 [("(alpha1-beta0)^2 gamma~^2>0", c.pos((a1 - b0) ** 2 * G, 4))],
                 [("alpha1-beta0=0", c.zero(a1 - b0))])
    elif case is CaseId.C3:
        c.add("alpha2!=0", not c.zero(a2), a2)
        c.add("beta2!=0", not c.zero(b2), b2)
        c.add("beta2 real", c.real(b2), b2)
        c.add("gamma1 real", c.real(g1), g1)
        c.add("gamma3=0", c.zero(g3), g3)
        c.add("alpha2 gamma1<0", c.neg(a2 * g1, 2), a2 * g1)
        want = np.sqrt(complex(g1**2 - 2 * a2 * g1))
        c.add("gamma2=sqrt(gamma1^2-2alpha2 gamma1)", c.zero(g2 - want), g2 - want)
        if not c.zero(a2):
            v1 = b1 - (2 * a2 + b2 * a1 / a2)
            v0 = b0 - (a1 + b2 * a0 / a2)
            c.add("beta1=2alpha2+beta2 alpha1/alpha2", c.zero(v1, 2), v1)
            c.add("beta0=alpha1+beta2 alpha0/alpha2", c.zero(v0, 2), v0)
    elif case in (CaseId.C4_1, CaseId.C4_2):
        c.add("alpha2!=0", not c.zero(a2), a2)
        c.add("beta2=0", c.zero(b2), b2)
        c.add("delta!=0", not c.zero(d), d)
        if case is CaseId.C4_1:
            c.add("(gamma1,gamma2)!=0", not (c.zero(g1) and c.zero(g2)))
            c.add("gamma1^2-gamma2^2<0", c.neg(dd, 2), dd)
            c.add("gamma3 imaginary", c.imag(g3), g3)
            c.add("delta real", c.real(d), d)
            c.add("i(alpha1-beta0) real", c.imag(a1 - b0), a1 - b0)
            c.add("beta1=2alpha2", c.zero(b1 - 2 * a2), b1 - 2 * a2)
        else:
            c.add("gamma1=0", c.zero(g1), g1)
            c.add("gamma2=0", c.zero(g2), g2)
            c.add("gamma3!=0", not c.zero(g3), g3)
            for n, v, pw in (("delta real", d, 1),
                             ("beta1(2alpha2-beta1) real", b1 * (2 * a2 - b1), 2),
                             ("beta0(2alpha2-beta1) real", b0 * (2 * a2 - b1), 2),
                             ("-beta0^2+2alpha1 beta0-2alpha0 beta1 real", -b0**2 + 2 * a1 * b0 - 2 * a0 * b1, 2),
                             ("gamma3(2alpha2-beta1) real", g3 * (2 * a2 - b1), 2),
                             ("gamma3(alpha1-beta0) real", g3 * (a1 - b0), 2)):
                c.add(n, c.real(v, pw), v)
    elif case is CaseId.C5:
        c.add("alpha2=0", c.zero(a2), a2)
        c.add("beta2!=0", not c.zero(b2), b2)
        c.add("alpha1!=0", not c.zero(a1), a1)
        c.add("gamma1^2-gamma2^2<0", c.neg(dd, 2), dd)
        c.add("gamma~^2<0", c.neg(G, 2), G)
        if not c.zero(a1):
            c.add("gamma3=gamma~^2/(2alpha1)", c.zero(g3 - G / (2 * a1)), g3 - G / (2 * a1))
        for n, v in (("beta0 real", b0), ("beta1 real", b1), ("beta2 real", b2), ("gamma2 real", g2)):
            c.add(n, c.real(v), v)
        v = d * (g2**2 - g1**2) + 2 * b2 * g1 * g3
        c.add("delta(gamma2^2-gamma1^2)+2beta2 gamma1 gamma3 real", c.real(v, 3), v)
        v = 2 * a0 * b2 * g3 - b1 * G + 2 * b2 * a1 * g1 + d * a1 * g3
        c.add("i(2alpha0 beta2 gamma3-beta1 gamma~^2+2beta2 alpha1 gamma1+delta alpha1 gamma3) real",
              c.imag(v, 3), v)
        v = (a1 - b0) * G + 2 * b2 * a0 * g1 + d * a0 * g3
        c.add("i((alpha1-beta0)gamma~^2+2beta2 alpha0 gamma1+delta alpha0 gamma3) real", c.imag(v, 3), v)
    elif case in (CaseId.C6_1, CaseId.C6_2):
        c.add("alpha2=0", c.zero(a2), a2)
        c.add("beta2=0", c.zero(b2), b2)
        if case is CaseId.C6_1:
            c.add("delta!=0", not c.zero(d), d)
            c.add("(gamma~1,gamma~2)!=0", not (c.zero(g1) and c.zero(g2)))
            c.add("gamma~^2<0", c.neg(G, 2), G)
            c.add("delta^2(gamma1^2-gamma2^2)<0", c.neg(d**2 * dd, 4), d**2 * dd)
            c.add("beta0 real", c.real(b0), b0)
            c.add("beta1 real", c.real(b1), b1)
            v = -b1 * G + d * a1 * g3
            c.add("i(-beta1 gamma~^2+delta alpha1 gamma3) real", c.imag(v, 3), v)
            v = (a1 - b0) * G + d * a0 * g3
            c.add("i((alpha1-beta0)gamma~^2+delta alpha0 gamma3) real", c.imag(v, 3), v)
        else:
            c.add("gamma1=0", c.zero(g1), g1)
            c.add("gamma2=0", c.zero(g2), g2)
            c.add("gamma3!=0", not c.zero(g3), g3)
            for n, v in (("beta1^2 real", b1**2), ("beta0 beta1 real", b0 * b1),
                         ("-beta1 gamma3+delta alpha1 real", -b1 * g3 + d * a1),
                         ("(alpha1-beta0)gamma3+delta alpha0 real", (a1 - b0) * g3 + d * a0),
                         ("-beta0^2+2alpha1 beta0-2alpha0 beta1 real", -b0**2 + 2 * a1 * b0 - 2 * a0 * b1)):
                c.add(n, c.real(v, 2), v)
    return Verdict(case, c.out)


# -- Lambda per case ------------------------------------------------------------------

def _sqrt(z):
    return np.sqrt(complex(z))


def lambda_case(case, p: QESParams) -> SimilarityTransform:
    """The constant matrix that Hermitizes the potential of ``case``.

    Raises DegenerateRotation (with an ``alternative`` attribute holding a
    working transform) when the printed index pair is degenerate.
    """
    case = CaseId.parse(case)
    g1, g2, g3 = p.gamma
    if case in (CaseId.C1, CaseId.C4_2, CaseId.C6_2):
        return SimilarityTransform.identity()
    if case is CaseId.C2:
        gt = p.gamma_tilde
        try:
            return lambda_ij(1, 2, gt[0], gt[1]).then(lambda_ij(2, 3, _sqrt(gt[0] ** 2 + gt[1] ** 2), gt[2]))
        except DegenerateRotation as exc:
            from .hermitize import reduce_single
            exc.alternative = reduce_single(gt)[0]
            raise
    if case is CaseId.C3:
        a2 = p.alpha[2]
        # the sign of gamma1 selects which of the two branches is Hermitian
        s = np.sign(g1.real)
        t = _sqrt(1 - 2 * a2 / g1) - _sqrt(-2 * a2 / g1)
        return SimilarityTransform(IDENTITY + s * t * S3)
    if case is CaseId.C4_1:
        return lambda_ij(2, 1, 1j * g1, g2)
    if case in (CaseId.C5, CaseId.C6_1):
        return lambda_ij(2, 1, 1j * g1, g2).then(
            lambda_ij(2, 3, -1j * g3 * _sqrt(g2**2 - g1**2), g1**2 - g2**2))
    raise AssertionError(case)


def lambda_case3_printed(p: QESParams) -> SimilarityTransform:
    """Case 3 matrix in the form displayed without the sign of gamma1."""
    a2 = p.alpha[2]
    g1 = complex(p.gamma1)
    return SimilarityTransform(IDENTITY + (_sqrt(1 - 2 * a2 / g1) - _sqrt(-2 * a2 / g1)) * S3)


# -- closed-form potentials ---------------------------------------------------------------

def _bc(v):
    return np.asarray(v)[..., None, None]


def _pre(p, x):
    a0, a1, a2 = p.alpha
    xi = p.xi(x)
    return xi, a2 / 2 - 3 * (2 * a2 * x + a1) ** 2 / (16 * xi)


def _v1(p, x, th):
    a0, a1, a2 = p.alpha
    b0, b1, b2 = p.beta
    m, d = p.m, p.delta
    xi, sc = _pre(p, x)
    poly = (-b2**2 * x**4 - (2 * b1 * b2 + 4 * a2 * b2 * (m - 1)) * x**3
            + (2 * a2 * b1 - 2 * a1 * b2 - b1**2 - 2 * b0 * b2 - 4 * a1 * b2 * (m - 1)) * x**2
            + (4 * a2 * b0 - 2 * b0 * b1 - 4 * m * a0 * b2) * x + 2 * a1 * b0 - 2 * a0 * b1 - b0**2)
    M = _bc(poly) * IDENTITY + _bc(4 * b2 * xi) * S1 + _bc((4 * b2 * x + 2 * d) * xi) * S3
    return M / _bc(4 * xi) + _bc(sc) * IDENTITY


def _v2(p, x, th):
    a0, a1, a2 = p.alpha
    b0, b1, _ = p.beta
    G = p.gamma_sq
    xi, sc = _pre(p, x)
    poly = b1 * (2 * a2 - b1) * x**2 + 2 * b0 * (2 * a2 - b1) * x + 2 * a1 * b0 - 2 * b1 * a0 - b0**2 - G
    M = _bc(poly) * IDENTITY + _bc((2 * (2 * a2 - b1) * x + 2 * (a1 - b0)) * _sqrt(G)) * S3
    return M / _bc(4 * xi) + _bc(sc) * IDENTITY


def _v3(p, x, th):
    a0, a1, a2 = p.alpha
    b0, b1, b2 = p.beta
    g1 = p.gamma[0]
    m, d = p.m, p.delta
    xi, sc = _pre(p, x)
    w = _sqrt(-2 * a2 * g1)
    r = _sqrt(g1**2 - 2 * a2 * g1)
    S, C = np.sin(th * w), np.cos(th * w)
    poly = (-b2**2 * x**4 - (2 * b2**2 * a1 / a2 + 4 * a2 * b2 * m) * x**3
            - (b2**2 / a2**2 * (a1**2 + 2 * a0 * a2) + 2 * a1 * b2 * (1 + 2 * m)) * x**2
            - (2 * a1 * b2 * (a1 * a2 + a0 * b2) / a2**2 + 4 * a0 * b2 * m) * x
            + a1**2 - b2**2 * a0**2 / a2**2 - 2 * b2 * a0 * a1 / a2 - 4 * a0 * a2 - 2 * a2 * g1)
    M = (_bc(poly) * IDENTITY
         + _bc(4 * b2 * x * xi) * (_bc(S) * S1 + _bc(C) * S3)
         + _bc(2 * xi) * (_bc(S / w) * (d * w * S1 - 2 * b2 * r * S3)
                          + _bc(C) * (2 * b2 * r / w * S1 + d * S3)))
    return M / _bc(4 * xi) + _bc(sc) * IDENTITY


def _v41(p, x, th):
    a0, a1, a2 = p.alpha
    b0, b1, _ = p.beta
    g1, g2, g3 = p.gamma
    d, G = p.delta, p.gamma_sq
    xi, sc = _pre(p, x)
    w = _sqrt(-G)
    r = _sqrt(g2**2 - g1**2)
    S, C = np.sin(th * w), np.cos(th * w)
    M = (_bc(-b0**2 + 2 * a1 * b0 - 2 * a0 * b1 - G + 0 * x) * IDENTITY
         + _bc(2 * xi) * (_bc(S / w) * (d * r * S1) + _bc(C) * ((-1j * d * g3 * r * S2 + d * (g1**2 - g2**2) * S3) / G))
         + _bc(2 * d * a2 * g3 / G * x**2 + 2 * d * a1 * g3 / G * x
               + ((2 * a1 - 2 * b0) * G + 2 * d * a0 * g3) / G) * (1j * r * S2 + g3 * S3))
    return M / _bc(4 * xi) + _bc(sc) * IDENTITY


def _v42(p, x, th):
    a0, a1, a2 = p.alpha
    b0, b1, _ = p.beta
    g3 = p.gamma[2]
    d = p.delta
    xi, sc = _pre(p, x)
    M = (_bc(b1 * (2 * a2 - b1) * x**2 + 2 * b0 * (2 * a2 - b1) * x - b0**2 + 2 * a1 * b0 - 2 * b1 * a0 - g3**2) * IDENTITY
         + _bc(2 * d * a2 * x**2 + 2 * x * ((2 * a2 - b1) * g3 + d * a1) + 2 * (a1 - b0) * g3 + 2 * d * a0) * S3)
    return M / _bc(4 * xi) + _bc(sc) * IDENTITY


def _v5(p, x, th):
    a0, a1, _ = p.alpha
    b0, b1, b2 = p.beta
    g1, g2, g3 = p.gamma
    m, d, G = p.m, p.delta, p.gamma_sq
    xi = a1 * x + a0
    sc = -3 * a1**2 / (16 * xi)
    w = _sqrt(-G)
    r = _sqrt(g2**2 - g1**2)
    q = _sqrt((g1**2 - g2**2) * G)
    S, C = np.sin(th * w) / w, np.cos(th * w)
    M = (_bc(-b2**2 * x**4 - 2 * b1 * b2 * x**3 + ((2 - 4 * m) * a1 * b2 - b1**2 - 2 * b0 * b2) * x**2
             - (2 * b0 * b1 + 4 * m * a0 * b2) * x + 2 * a1 * b0 - 2 * a0 * b1 - b0**2 - G) * IDENTITY
         + _bc(4 * x * xi) * (_bc(S) * (b2 * r * S1) + _bc(C) * (b2 * q / G * S3))
         + _bc(2 * xi) * (_bc(S) * ((d * (g2**2 - g1**2) + 2 * b2 * g1 * g3) / r * S1 - 2 * b2 * g2 * G / q * S3)
                          + _bc(C) * (2 * b2 * g2 / r * S1 + (d * (g1**2 - g2**2) - 2 * b2 * g1 * g3) / q * S3))
         + _bc(x * (4 * a0 * b2 * g3 - 2 * b1 * G + 4 * a1 * b2 * g1 + 2 * d * a1 * g3) / G
               + ((2 * a1 - 2 * b0) * G + 4 * a0 * b2 * g1 + 2 * d * a0 * g3) / G) * (-1j * w * S2))
    return M / _bc(4 * xi) + _bc(sc) * IDENTITY


def _v61(p, x, th):
    a0, a1, _ = p.alpha
    b0, b1, _ = p.beta
    g1, g2, g3 = p.gamma
    d, G = p.delta, p.gamma_sq
    xi = a1 * x + a0
    sc = -3 * a1**2 / (16 * xi)
    w = _sqrt(-G)
    r = _sqrt(g2**2 - g1**2)
    q = _sqrt((g1**2 - g2**2) * G)
    S, C = np.sin(th * w) / w, np.cos(th * w)
    M = (_bc(-b1**2 * x**2 - 2 * b0 * b1 * x + 2 * a1 * b0 - 2 * a0 * b1 - b0**2 - G) * IDENTITY
         + _bc(2 * xi) * (_bc(S) * (d * r * S1) + _bc(C) * (d * (g1**2 - g2**2) / q * S3))
         + _bc(x * (-2 * b1 * G + 2 * d * a1 * g3) / G + ((2 * a1 - 2 * b0) * G + 2 * d * a0 * g3) / G)
         * (-1j * w * S2))
    return M / _bc(4 * xi) + _bc(sc) * IDENTITY


def _v62(p, x, th):
    a0, a1, _ = p.alpha
    b0, b1, _ = p.beta
    g3 = p.gamma[2]
    xi = a1 * x + a0
    sc = -3 * a1**2 / (16 * xi)
    bracket = 2 * x * b1 * (a1 - g3) + 2 * (a1 - b0) * g3 + 2 * b1 * a0
    M = (_bc(-b1**2 * x**2 - 2 * b0 * b1 * x + 2 * a1 * b0 - 2 * a0 * b1 - b0**2 - g3**2) * IDENTITY
         + _bc(bracket) * S3)
    return M / _bc(4 * xi) + _bc(sc) * IDENTITY


_FORMS = {CaseId.C1: _v1, CaseId.C2: _v2, CaseId.C3: _v3, CaseId.C4_1: _v41, CaseId.C4_2: _v42,
          CaseId.C5: _v5, CaseId.C6_1: _v61, CaseId.C6_2: _v62}


def potential_case_x(case, p: QESParams, x, theta):
    """Closed-form potential of ``case`` at ``x`` with angle ``theta`` (vectorized)."""
    case = CaseId.parse(case)
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=complex)
    return _FORMS[case](p, x, theta)


def potential_case(case, p: QESParams, gauge: GaugeMap | None = None, *, check: bool = True,
                   tol: float = 1e-9, **gauge_kw) -> PotentialFn:
    """``V(y)`` for an admissible parameter set of ``case``.

    Raises ConstraintViolation when ``check`` and the conditions fail.
    """
    case = CaseId.parse(case)
    if check:
        v = check_constraints(case, p, tol)
        if not v.passed:
            raise ConstraintViolation(v)
    if gauge is None:
        gauge = solve_gauge(p, Lambda=lambda_case(case, p), **gauge_kw)

    def at_x(x):
        return potential_case_x(case, p, x, gauge.theta(x))

    return PotentialFn(at_x, gauge, params=p, case=case, label=f"case {case.value}")


# -- admissible samplers ---------------------------------------------------------------

def _nz(rng, lo=0.3, hi=2.0):
    return float(rng.choice([-1, 1]) * rng.uniform(lo, hi))


def sample_admissible(case, rng: np.random.Generator, m: int | None = None) -> QESParams:
    """Random parameters satisfying every condition of ``case``.

    Equality constraints are solved for dependent parameters; disjunctions
    pick a branch at random.
    """
    case = CaseId.parse(case)
    if m is None:
        m = int(rng.integers(2, 6))
    R = lambda: float(rng.uniform(-2, 2))  # noqa: E731
    for _ in range(1000):
        p = _draw(case, rng, m, R)
        if p is not None and _has_positive_region(p) and check_constraints(case, p).passed:
            return p
    raise RuntimeError(f"no admissible draw for case {case.value}")


def _has_positive_region(p: QESParams) -> bool:
    try:
        default_anchor(p)
    except DomainError:
        return False
    return True


def _draw(case, rng, m, R):
    branch = bool(rng.integers(2))
    if case is CaseId.C1:
        a = [R(), R(), R()]
        if branch:
            return QESParams(*a, R(), R(), R(), m=m)
        return QESParams(*a, a[1] + 1j * R(), 2 * a[2], 0, m=m)
    if case is CaseId.C2:
        a = [R(), R(), R()]
        g = [R(), R(), R()]
        if g[0] ** 2 - g[1] ** 2 + g[2] ** 2 <= 0.1:
            return None
        b1 = -2 * a[2] * (m - 1) - m * (g[0] + g[1])
        return QESParams(*a, R(), b1, 0, *g, m=m)
    if case is CaseId.C3:
        a2 = _nz(rng)
        g1 = -np.sign(a2) * rng.uniform(0.3, 2)
        a1, a0, b2 = R(), R(), _nz(rng)
        return QESParams(a0, a1, a2, a1 + b2 * a0 / a2, 2 * a2 + b2 * a1 / a2, b2,
                         g1, np.sqrt(g1**2 - 2 * a2 * g1), 0, m=m)
    if case is CaseId.C4_1:
        g1 = R()
        g2 = float(rng.choice([-1, 1])) * (abs(g1) + rng.uniform(0.3, 2))
        a = [R(), R(), _nz(rng)]
        return QESParams(*a, a[1] + 1j * R(), 2 * a[2], 0, g1, g2, 1j * R(), m=m)
    if case is CaseId.C4_2:
        a = [R(), R(), _nz(rng)]
        if branch:
            return QESParams(*a, R(), R(), 0, 0, 0, _nz(rng), m=m)
        return QESParams(*a, a[1] + 1j * R(), 2 * a[2], 0, 0, 0, 1j * _nz(rng), m=m)
    if case is CaseId.C5:
        a1, a0 = _nz(rng), R()
        g1 = R()
        g2 = float(rng.choice([-1, 1])) * (abs(g1) + rng.uniform(0.3, 2))
        dd = g1**2 - g2**2
        g3 = a1 - np.sign(a1) * np.sqrt(a1**2 - dd)
        G = dd + g3**2
        b2 = _nz(rng)
        b1 = (2 * a0 * b2 * g3 + 2 * b2 * a1 * g1 + m * (g1 + g2) * a1 * g3) / (a1 * g3)
        d = b1 + m * (g1 + g2)
        b0 = a1 + (2 * b2 * a0 * g1 + d * a0 * g3) / G
        return QESParams(a0, a1, 0, b0, b1, b2, g1, g2, g3, m=m)
    if case is CaseId.C6_1:
        a1, a0 = R(), R()
        g1 = R()
        g2 = float(rng.choice([-1, 1])) * (abs(g1) + rng.uniform(0.3, 2))
        if branch:
            return QESParams(a0, a1, 0, a1, 0, 0, g1, g2, 1j * R(), m=m)
        g3 = R()
        G = g1**2 - g2**2 + g3**2
        if G >= -0.05 or abs(a1 * g3 - G) < 0.05:
            return None
        b1 = -m * (g1 + g2) * a1 * g3 / (a1 * g3 - G)
        d = b1 + m * (g1 + g2)
        return QESParams(a0, a1, 0, a1 + d * a0 * g3 / G, b1, 0, g1, g2, g3, m=m)
    if case is CaseId.C6_2:
        a0, a1 = R(), R()
        if branch:
            return QESParams(a0, a1, 0, R(), R(), 0, 0, 0, _nz(rng), m=m)
        return QESParams(a0, a1, 0, a1 + 1j * R(), 0, 0, 0, 0, 1j * _nz(rng), m=m)
    raise AssertionError(case)
