"""Four worked QES matrix models as ready-made fixtures.

1. ``alpha0 = beta2 = 1``: quartic potential, basis square integrable only on half lines.
2. ``alpha1 = 1, beta2 = -1, beta0 = 1/2``: sextic potential on the whole line.
3. ``alpha2 = 1, beta2 = -1, gamma1 = -1`` (rest of the family fixed): exponential/trigonometric potential.
4. ``D2 + A1 + 2 B2``: potential in terms of the function ``w`` with ``y = int_0^w dx/sqrt(x^3 + x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .families import lambda_case
from .gauge import GaugeMap, QESParams, build_hamiltonian, gauge_from_operator, solve_gauge
from .hermitize import IDENTITY, PAULI, SimilarityTransform
from .invariant import InvariantBasis, RestrictionMatrix, build_basis, restrict
from .liealg import quadratic_forms
from .numerics import fd_apply, find_bracket, integrate, invert_monotone
from .opalg import DiffOp, exact

S1, S2, S3 = PAULI

# -- the w function ----------------------------------------------------------------


def _w_integrand(t: float) -> float:
    return 1.0 / math.sqrt(t**3 + t) if t > 0 else 0.0


def w_primitive(w: float) -> float:
    """``int_0^w dx / sqrt(x^3 + x)`` for ``w >= 0``."""
    if w < 0:
        raise ValueError("w must be non-negative")
    return integrate(_w_integrand, 0.0, w)


W_Y_MAX = integrate(_w_integrand, 0.0, math.inf)
"""Supremum of the quadrature map; ``w(y)`` blows up as ``y`` approaches it."""


def weierstrass_w(y):
    """Inverse of ``w -> int_0^w dx/sqrt(x^3+x)`` on ``[0, W_Y_MAX)``.

    Raises ValueError for ``y`` outside that range.
    """
    if np.ndim(y):
        return np.array([weierstrass_w(float(v)) for v in np.ravel(y)]).reshape(np.shape(y))
    if y < 0 or y >= W_Y_MAX:
        raise ValueError(f"y = {y} outside [0, {W_Y_MAX})")
    if y == 0:
        return 0.0
    lo, hi = find_bracket(w_primitive, y, 0.0, 0.0, math.inf, increasing=True, step=max(y * y / 4, 1e-3))
    return invert_monotone(w_primitive, y, (lo, hi), dfn=_w_integrand)


# -- model container ------------------------------------------------------------------

def _stack_vec(a, b):
    return np.stack([np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)], axis=-1)


@dataclass
class ExampleModel:
    """A worked model with its pre-gauge operator, gauge map and closed forms.

    ``potential`` and ``basis`` come from the gauge pipeline; the ``printed_*``
    callables are the closed forms as displayed for the model (after the
    corrections recorded in the project notes).
    """

    id: int
    m: int
    hamiltonian: DiffOp
    gauge: GaugeMap
    params: QESParams | None = None
    printed_potential: Callable | None = None
    printed_basis: list[Callable] | None = None
    domain: tuple[float, float] = (-math.inf, math.inf)
    notes: list[str] = field(default_factory=list)

    @property
    def basis_polys(self) -> InvariantBasis:
        return build_basis(self.m)

    def restriction(self) -> RestrictionMatrix:
        return restrict(self.hamiltonian, self.basis_polys)

    def potential(self, y):
        return self.gauge.potential(y)

    @property
    def basis(self) -> list[Callable]:
        return self.gauge.transform_basis(self.basis_polys)

    def sample(self, ys):
        """``(V, psi)`` at the points ``ys`` with one inversion of ``f`` per point."""
        x = self.gauge.f_inverse(np.asarray(ys, dtype=float))
        V = self.gauge.potential_x(x)
        Ui = self.gauge.U_inv(x)
        psi = np.array([np.einsum("...ab,...b->...a", Ui, r(x)) for r in self.basis_polys.vectors])
        return V, psi


def example_model(id: int, m: int) -> ExampleModel:
    if m < 2:
        raise ValueError("m must be >= 2")
    if id == 1:
        return _example1(m)
    if id == 2:
        return _example2(m)
    if id == 3:
        return _example3(m)
    if id == 4:
        return _example4(m)
    raise ValueError(f"no example {id}")


def _example1(m):
    p = QESParams(alpha0=1, beta2=1, m=m)
    g = solve_gauge(p, 0.0)

    def V(y):
        y = np.asarray(y, dtype=float)[..., None, None]
        return (-y**4 / 4 - m * y) * IDENTITY + y * S3 + S1

    basis = []
    for j in range(m - 1):
        basis.append(lambda y, j=j: _stack_vec(np.exp(np.asarray(y) ** 3 / 6) * np.asarray(y) ** j, 0 * np.asarray(y)))
    for k in range(m + 1):
        def gk(y, k=k):
            y = np.asarray(y, dtype=float)
            e = np.exp(y**3 / 6)
            return _stack_vec(-k * e * y ** max(k - 1, 0) if k else 0 * y, m * e * y**k)
        basis.append(gk)
    return ExampleModel(1, m, build_hamiltonian(p), g, p, V, basis,
                        notes=["basis second block uses e1 where the display has e_y"])


def _example2(m):
    p = QESParams(alpha1=1, beta2=-1, beta0=0.5, m=m)
    # f is anchored at the simple zero x = 0 of xi, so y = 2 sqrt(x) and x = y^2/4
    g = solve_gauge(p, 1.0, x0=0.0)

    def V(y):
        y = np.asarray(y, dtype=float)[..., None, None]
        return (-y**6 / 256 + (4 * m - 1) / 16 * y**2) * IDENTITY - y**2 / 4 * S3 - S1

    basis = []
    for j in range(m - 1):
        basis.append(lambda y, j=j: _stack_vec(np.exp(-np.asarray(y) ** 4 / 64) * (np.asarray(y) / 2) ** (2 * j),
                                               0 * np.asarray(y)))
    for k in range(m + 1):
        def gk(y, k=k):
            y = np.asarray(y, dtype=float)
            e = np.exp(-y**4 / 64)
            return _stack_vec(-k * e * (y / 2) ** (2 * k - 2) if k else 0 * y, m * e * (y / 2) ** (2 * k))
        basis.append(gk)
    return ExampleModel(2, m, build_hamiltonian(p), g, p, V, basis,
                        notes=["the gauge route covers y >= 0; the closed forms are even in y "
                               "and define the model on the whole line"])


def _example3(m):
    s3 = math.sqrt(3)
    p = QESParams(alpha2=1, beta2=-1, beta1=2, beta0=0, gamma1=-1, gamma2=s3, m=m)
    L = lambda_case("3", p)
    # y = -ln x and theta = 1/x = e^y
    g = solve_gauge(p, 1.0, sign=-1, theta_shift=1.0, Lambda=L)

    def V(y):
        y = np.asarray(y, dtype=float)
        a = math.sqrt(2) * np.exp(y)
        S, C = np.sin(a), np.cos(a)
        k = m * (s3 + 1) / 2
        sc = -0.25 - 0.25 * np.exp(-2 * y) + m * np.exp(-y) + 0.5 * np.exp(2 * y)
        c1 = k * S - math.sqrt(6) / 2 * C - np.exp(-y) * S
        c3 = k * C + math.sqrt(6) / 2 * S - np.exp(-y) * C
        b = lambda v: np.asarray(v)[..., None, None]  # noqa: E731
        return b(sc) * IDENTITY + b(c1) * S1 + b(c3) * S3

    return ExampleModel(3, m, build_hamiltonian(p), g, p, V, None,
                        notes=["Lambda carries the sign of gamma1: 1 - (sqrt3 - sqrt2) sigma3"])


def example3_printed_u_inverse(y):
    """The displayed ``U^{-1}(y)`` of the third model, transcribed literally."""
    y = np.asarray(y, dtype=float)
    a = math.sqrt(2) * np.exp(y)
    pref = np.exp(-y / 2) * np.exp(-0.5 * np.exp(-y)) / (2 * math.sqrt(2))
    left = (math.sqrt(3) + math.sqrt(2)) * IDENTITY - S3
    rot = (np.cos(a)[..., None, None] * IDENTITY
           + np.sin(a)[..., None, None] * (1j * math.sqrt(3) * S2 - S1) / math.sqrt(2))
    return pref[..., None, None] * (left @ rot)


def example4_hamiltonian(m: int) -> DiffOp:
    f = quadratic_forms(m)
    return f["D2"] + f["A1"] + f["B2"] * exact(2)


def _example4(m):
    H = example4_hamiltonian(m)
    # phase = -arctan x, so that U^{-1} is proportional to xi^(-1/4) (1 - i sigma2 x);
    # Lambda = sigma1 brings the potential to the displayed orientation of sigma3
    g = gauge_from_operator(H, 1.0, x0=0.0, theta_shift=-math.pi / 4,
                            Lambda=SimilarityTransform(S1.copy()))

    def V(y):
        w = np.asarray(weierstrass_w(y), dtype=float)
        b = lambda v: np.asarray(v)[..., None, None]  # noqa: E731
        sc = (m - m * m - 1) * w - 3 * (w**2 - 1) ** 2 / (16 * (w**3 + w))
        return b(sc) * IDENTITY + b((2 * m - 1) / (w**2 + 1)) * (2 * S1 + b(w**3 + 3 * w) * S3)

    basis = []
    rs = build_basis(m).vectors
    for r in rs:
        def psi(y, r=r):
            w = np.asarray(weierstrass_w(y), dtype=float)
            Ui = (w**3 + w)[..., None, None] ** -0.25 * (IDENTITY - 1j * S2 * w[..., None, None])
            return np.einsum("...ab,...b->...a", Ui, r(w))
        basis.append(psi)
    return ExampleModel(4, m, H, g, None, V, basis, domain=(0.0, W_Y_MAX),
                        notes=["displayed basis uses w(y)^j where exp(-jy) is printed",
                               "displayed basis matches Lambda = 1, the displayed potential Lambda = sigma1"])


# -- checks ------------------------------------------------------------------------------------

def closure_residual(model: ExampleModel, ys, order: int = 4, potential=None, basis=None) -> float:
    """``max_i |H psi_i - sum_j M_ji psi_j| / max|psi|`` on the interior of a uniform grid.

    Uses the gauge pipeline unless ``potential``/``basis`` callables are given.
    """
    ys = np.asarray(ys, dtype=float)
    M = model.restriction().to_numpy()
    if potential is None and basis is None:
        V, psi = model.sample(ys)
        Vf = lambda pts: V[_interior(order, len(ys))]  # noqa: E731
        psis = [lambda pts, i=i: psi[i] for i in range(len(psi))]
        vals = psi
    else:
        Vf = potential
        psis = basis
        vals = np.array([b(ys) for b in basis])
    worst = 0.0
    sl = _interior(order, len(ys))
    for i, ps in enumerate(psis):
        pts, hpsi = fd_apply(Vf, ps, ys, order=order)
        comb = np.einsum("j,jka->ka", M[:, i], vals[:, sl])
        scale = np.abs(vals[i]).max()
        worst = max(worst, float(np.abs(hpsi - comb).max() / scale))
    return worst


def _interior(order, n):
    k = 1 if order == 2 else 2
    return slice(k, n - k)


@dataclass
class HermiticityVerdict:
    """Outcome of the two conditions for a Hermitian restriction matrix on ``[A, B]``."""

    interval: tuple[float, float]
    square_integrable: bool
    boundary_max: float
    pairing_holds: bool

    @property
    def hermitian(self) -> bool:
        return self.square_integrable and self.pairing_holds

    def to_dict(self) -> dict:
        return {"interval": list(self.interval), "square_integrable": self.square_integrable,
                "boundary_max": self.boundary_max, "pairing_holds": self.pairing_holds,
                "hermitian": self.hermitian}


DEFAULT_INTERVAL = {1: (-math.inf, 1.0), 2: (-math.inf, math.inf), 3: (-math.inf, math.inf),
                    4: (0.0, W_Y_MAX)}


def _basis_for_checks(model: ExampleModel):
    if model.id in (1, 2):
        return model.printed_basis, model.printed_potential
    return model.basis, model.potential


def _tail_point(funcs, start: float, direction: int, tol: float = 1e-10, limit=None) -> tuple[float, bool]:
    """Walk outwards until every function is below ``tol`` (relative to its peak)."""
    peak = max(float(np.abs(f(start)).max()) for f in funcs) or 1.0
    y = start
    step = 0.5
    for _ in range(200):
        y_next = y + direction * step
        if limit is not None and (y_next - limit) * direction >= 0:
            return y, False
        try:
            vals = [float(np.abs(f(y_next)).max()) for f in funcs]
        except (ValueError, ArithmeticError):
            return y, False
        peak = max(peak, *vals)
        y = y_next
        if max(vals) <= tol * peak:
            return y, True
        step *= 1.25
    return y, False


def _pairing(funcs, y, h=1e-4):
    vals = [np.asarray(f(y)) for f in funcs]
    ders = [(np.asarray(f(y + h)) - np.asarray(f(y - h))) / (2 * h) for f in funcs]
    n = len(funcs)
    out = 0.0
    for j in range(n):
        for k in range(n):
            w = np.vdot(ders[j], vals[k]) - np.vdot(vals[j], ders[k])
            out = max(out, abs(w))
    return out


def _window(funcs, y, half=0.25, n=9, h=1e-4):
    """Largest basis norm and pairing over a small window around ``y``.

    The window smooths out oscillating matrix factors; all points are
    evaluated in one vectorized call per function.
    """
    ts = np.linspace(y - half, y + half, n)
    pts = np.concatenate([ts, ts + h, ts - h])
    vals = [np.asarray(f(pts)) for f in funcs]
    v0 = [v[:n] for v in vals]
    d = [(v[n:2 * n] - v[2 * n:]) / (2 * h) for v in vals]
    norm = max(float(np.abs(v).max()) for v in v0)
    pair = 0.0
    for j in range(len(funcs)):
        for k in range(len(funcs)):
            w = np.einsum("ta,ta->t", d[j].conj(), v0[k]) - np.einsum("ta,ta->t", v0[j].conj(), d[k])
            pair = max(pair, float(np.abs(w).max()))
    return norm, pair


def _infinite_end(funcs, start, direction, tol, smax=40.0):
    """Sample norms and pairings outwards from ``start`` toward an infinite end.

    Returns ``(integrable, boundary, pairing_ok)``.  A quantity is taken to
    vanish at the end when it drops below ``tol`` of its peak, or when its
    logarithm falls off at least linearly over the last samples (exponential
    decay); samples stop where the gauge can no longer be evaluated.
    """
    ys, norms, pairs = [], [], []
    for s in np.arange(1.0, smax + 1.0, 1.0):
        y = start + direction * s
        try:
            nv, pv = _window(funcs, y)
        except (ValueError, ArithmeticError):
            break
        if not (np.isfinite(nv) and np.isfinite(pv)):
            break
        ys.append(y)
        norms.append(nv)
        pairs.append(pv)
        if nv <= 1e-300:
            break
    if len(ys) < 3:
        return False, math.inf, False
    peak_n = max(norms)
    peak_p = max(max(pairs), 1e-300)

    def vanishes(vals, peak):
        if vals[-1] <= tol * peak:
            return True
        logs = np.log(np.maximum(vals[-4:], 1e-300))
        slope = np.polyfit(np.abs(np.array(ys[-4:]) - start), logs, 1)[0]
        return bool(slope < -0.05)

    return vanishes(norms, peak_n), pairs[-1], vanishes(pairs, peak_p)


def hermiticity_of_M(id: int, m: int, interval: tuple[float, float] | None = None,
                     tol: float = 1e-8) -> HermiticityVerdict:
    """Square integrability of the basis and the boundary pairing on ``interval``.

    The pairing is the conjugated Wronskian ``psi_j'^* psi_k - psi_j^* psi_k'``
    and must vanish at both ends.  At an infinite end both the basis and the
    pairing are sampled outwards and must decay (see ``_infinite_end``).  At a
    finite end where the basis is regular the pairing is evaluated there; at a
    singular end (Example 4) integrability is judged from ``|psi|^2 d`` with
    ``d`` the distance to the end.
    """
    model = example_model(id, m)
    A, B = interval if interval is not None else DEFAULT_INTERVAL[id]
    funcs, _ = _basis_for_checks(model)
    lo, hi = model.gauge.y_range if id not in (1, 2) else (-math.inf, math.inf)
    if math.isfinite(A) and math.isfinite(B):
        inside = 0.5 * (A + B)
    elif math.isfinite(A):
        inside = A + 1.0
    elif math.isfinite(B):
        inside = B - 1.0
    else:
        inside = 0.0
    integrable, pairing_ok, boundary = True, True, 0.0
    scale = max(1.0, max(float(np.abs(f(inside)).max()) for f in funcs) ** 2)
    for end, direction in ((A, -1), (B, +1)):
        if math.isinf(end):
            ok_n, bval, ok_p = _infinite_end(funcs, inside, direction, tol)
            integrable &= ok_n
            pairing_ok &= ok_p
            boundary = max(boundary, bval)
            continue
        singular = any(abs(end - e) <= 1e-12 for e in (lo, hi) if math.isfinite(e))
        if singular:
            integrable &= _finite_end_integrable(funcs, end, -direction)
            # the pairing is sampled close to the singular end and must shrink toward it
            near = [_pairing(funcs, end - direction * t) for t in (1e-2, 1e-3)]
            pairing_ok &= near[1] < 0.5 * near[0]
            boundary = max(boundary, near[1])
        else:
            bval = _pairing(funcs, end)
            boundary = max(boundary, bval)
            pairing_ok &= bval <= tol * scale
    return HermiticityVerdict((A, B), bool(integrable), float(boundary), bool(pairing_ok))


def _finite_end_integrable(funcs, end, direction) -> bool:
    """``|psi|^2 d -> 0`` as the distance ``d`` to ``end`` shrinks."""
    ts = 10.0 ** -np.arange(1, 4)
    g = []
    for t in ts:
        try:
            g.append(max(float(np.abs(f(end + direction * t)).max()) ** 2 * t for f in funcs))
        except (ValueError, ArithmeticError):
            return False
    return g[-1] < 0.5 * g[0]


def decay_rates(model: ExampleModel, y1: float = 8.0, y2: float = 10.0) -> list[float]:
    """Fitted exponents ``c`` with ``|psi_i(y)| ~ exp(-c y)`` between ``y1`` and ``y2``.

    The oscillating matrix factor is bounded, so the norm is fitted on a
    small window around each end point.
    """
    out = []
    funcs = model.basis
    for f in funcs:
        n1 = max(float(np.linalg.norm(f(y))) for y in np.linspace(y1 - 0.05, y1 + 0.05, 11))
        n2 = max(float(np.linalg.norm(f(y))) for y in np.linspace(y2 - 0.05, y2 + 0.05, 11))
        out.append(-(math.log(n2) - math.log(n1)) / (y2 - y1))
    return out


def example2_interval(m: int, tol: float = 1e-10) -> float:
    """Half-width ``L`` beyond which every basis function is below ``tol`` of its peak."""
    model = example_model(2, m)
    L, ok = _tail_point(model.printed_basis, 0.0, +1, tol)
    if not ok:
        raise ArithmeticError("basis does not decay")
    return L
