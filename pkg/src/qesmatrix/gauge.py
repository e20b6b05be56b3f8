"""Gauge transformation of ``xi d^2 + B d + C`` to the Schroedinger form ``d_y^2 + V(y)``.

The change of variables is ``y = f(x) = +/- int dx / sqrt(xi)`` together with
``psi = U^{-1}(x) phi`` where

    U(x) = xi^(1/4) exp(-1/2 int eta/xi) exp(1/2 phase(x) K) Lambda,

``B(x) = eta(x) I + g(x) K`` with a constant traceless ``K`` and
``phase(x) = -int g/xi + c``.  For the quadratic QES Hamiltonians ``g = 1``,
``K = gamma~ . sigma`` and the phase is the angle ``theta``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .hermitize import PAULI, IDENTITY, SimilarityTransform, pauli_components, pauli_matrix
from .invariant import InvariantBasis
from .liealg import quadratic_forms
from .numerics import find_bracket, integrate, invert_monotone
from .opalg import DiffOp, MatrixPoly, exact, to_complex

SIGMA = PAULI


class DomainError(ValueError):
    """Evaluation point outside the working interval of the gauge map."""


# -- parameters --------------------------------------------------------------

_COMPLEX_KEYS = ("beta0", "beta1", "beta2", "gamma1", "gamma2", "gamma3")
_REAL_KEYS = ("alpha0", "alpha1", "alpha2")


def _as_complex_json(v):
    if isinstance(v, Mapping):
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, bool) or not isinstance(v, (int, float, complex)):
        raise TypeError(f"not a number: {v!r}")
    return v


@dataclass(frozen=True)
class QESParams:
    """Parameters of the general quadratic QES Hamiltonian.

    ``alpha*`` are real, ``beta*``/``gamma*`` complex.  Integer and
    ``Fraction`` inputs are kept as given so the exact Hamiltonian is exact.
    """

    alpha0: float = 0
    alpha1: float = 0
    alpha2: float = 0
    beta0: complex = 0
    beta1: complex = 0
    beta2: complex = 0
    gamma1: complex = 0
    gamma2: complex = 0
    gamma3: complex = 0
    m: int = 2

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m!r}")
        for k in _REAL_KEYS:
            v = getattr(self, k)
            if isinstance(v, complex):
                if v.imag != 0:
                    raise ValueError(f"{k} must be real, got {v}")
                object.__setattr__(self, k, v.real)
        if self.alpha0 == 0 and self.alpha1 == 0 and self.alpha2 == 0:
            raise ValueError("xi(x) vanishes identically")

    # numeric views
    @property
    def alpha(self) -> tuple[float, float, float]:
        return float(self.alpha0), float(self.alpha1), float(self.alpha2)

    @property
    def beta(self) -> tuple[complex, complex, complex]:
        return complex(self.beta0), complex(self.beta1), complex(self.beta2)

    @property
    def gamma(self) -> tuple[complex, complex, complex]:
        return complex(self.gamma1), complex(self.gamma2), complex(self.gamma3)

    @property
    def gamma_tilde(self) -> np.ndarray:
        g1, g2, g3 = self.gamma
        return np.array([g1, 1j * g2, g3])

    @property
    def gamma_sq(self) -> complex:
        g = self.gamma_tilde
        return complex(g @ g)

    @property
    def delta(self) -> complex:
        a0, a1, a2 = self.alpha
        b0, b1, b2 = self.beta
        g1, g2, _ = self.gamma
        return 2 * a2 * (self.m - 1) + b1 + self.m * (g1 + g2)

    def xi(self, x):
        a0, a1, a2 = self.alpha
        return (a2 * x + a1) * x + a0

    def dxi(self, x):
        _, a1, a2 = self.alpha
        return 2 * a2 * x + a1

    def eta(self, x):
        b0, b1, b2 = self.beta
        return (b2 * x + b1) * x + b0

    def deta(self, x):
        _, b1, b2 = self.beta
        return 2 * b2 * x + b1

    def replace(self, **kw) -> QESParams:
        return replace(self, **kw)

    @classmethod
    def from_dict(cls, d: Mapping) -> QESParams:
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise KeyError(f"unknown parameter keys: {sorted(unknown)}")
        kw = {}
        for k, v in d.items():
            if k == "m":
                if isinstance(v, bool) or not isinstance(v, int):
                    raise TypeError("m must be an integer")
                kw[k] = v
            elif k in _REAL_KEYS:
                v = _as_complex_json(v)
                if isinstance(v, complex):
                    if v.imag != 0:
                        raise ValueError(f"{k} must be real")
                    v = v.real
                kw[k] = v
            else:
                kw[k] = _as_complex_json(v)
        return cls(**kw)

    def to_dict(self) -> dict:
        out = {}
        for k in _REAL_KEYS:
            out[k] = float(getattr(self, k))
        for k in _COMPLEX_KEYS:
            z = complex(getattr(self, k))
            out[k] = {"re": z.real, "im": z.imag}
        out["m"] = int(self.m)
        return out


# -- Hamiltonian ---------------------------------------------------------------

_FORM_WEIGHTS = (("alpha0", "A0"), ("alpha1", "A1"), ("alpha2", "A2"),
                 ("beta0", "B0"), ("beta1", "B1"), ("beta2", "B2"),
                 ("gamma1", "C1"), ("gamma2", "C2"), ("gamma3", "C3"))


def build_hamiltonian(p: QESParams) -> DiffOp:
    """``sum alpha_mu A_mu + beta_mu B_mu + sum gamma_i C_i`` with exact coefficients."""
    forms = quadratic_forms(int(p.m))
    H = DiffOp()
    for key, name in _FORM_WEIGHTS:
        c = getattr(p, key)
        if c != 0:
            H = H + forms[name] * exact(c)
    return H


def hamiltonian_expanded(p: QESParams) -> DiffOp:
    """The same operator assembled directly from its expanded coefficient form."""
    from .opalg import ID, SIGMA1, SIGMA2, SIGMA3, IMAG

    e = {k: exact(getattr(p, k)) for k in _REAL_KEYS + _COMPLEX_KEYS}
    m = int(p.m)
    xi = MatrixPoly([ID * e["alpha0"], ID * e["alpha1"], ID * e["alpha2"]])
    first = MatrixPoly([
        ID * e["beta0"] + SIGMA1 * e["gamma1"] + SIGMA2 * (IMAG * e["gamma2"]) + SIGMA3 * e["gamma3"],
        ID * e["beta1"], ID * e["beta2"]])
    s3 = (e["alpha2"] * exact(m - 1) + e["beta1"] * exact(Fraction(1, 2))
          + exact(Fraction(m, 2)) * (e["gamma1"] + e["gamma2"]))
    zeroth = MatrixPoly([SIGMA1 * e["beta2"] + SIGMA3 * s3,
                         SIGMA3 * e["beta2"] - ID * (e["beta2"] * exact(m - 1))])
    return DiffOp([zeroth, first, xi])


# -- operator data in float form ---------------------------------------------

def _poly_eval(coeffs, x):
    """Horner on a coefficient list (lowest first), complex or real arrays."""
    acc = 0 * np.asarray(x, dtype=complex)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class OperatorData:
    """``xi d^2 + (eta I + g K) d + C`` in float form, with ``K`` traceless and constant."""

    xi: tuple[float, ...]          # real polynomial coefficients, lowest first
    eta: tuple[complex, ...]
    g: tuple[float, ...]
    K: np.ndarray                  # 2x2 traceless
    C: np.ndarray                  # (deg+1, 2, 2)

    @classmethod
    def from_diffop(cls, H: DiffOp) -> OperatorData:
        if H.order != 2:
            raise ValueError("operator must have order exactly 2")
        lead = H.coefficient(2)
        xi = []
        for c in lead.coeffs:
            if not c.is_scalar():
                raise ValueError("leading coefficient must be a scalar multiple of I")
            v = to_complex(c.a)
            if v.imag != 0:
                raise ValueError("leading coefficient must be real")
            xi.append(v.real)
        B = H.coefficient(1).to_numpy() if not H.coefficient(1).is_zero() else np.zeros((1, 2, 2), complex)
        eta = tuple(0.5 * np.trace(b) for b in B)
        T = [b - 0.5 * np.trace(b) * IDENTITY for b in B]
        lead_idx = next((k for k, t in enumerate(T) if np.abs(t).max() > 0), None)
        if lead_idx is None:
            K = np.zeros((2, 2), complex)
            g = (0.0,)
        else:
            K = T[lead_idx]
            kk = np.abs(K).argmax()
            g = []
            for t in T:
                ratio = t.flat[kk] / K.flat[kk]
                if np.abs(t - ratio * K).max() > 1e-12 * max(1.0, np.abs(t).max()):
                    raise ValueError("traceless part of B(x) does not have a fixed direction")
                if abs(ratio.imag) > 1e-12 * max(1.0, abs(ratio)):
                    # absorb complex scalings into K only when uniform
                    raise ValueError("direction of B(x) rotates by complex factor")
                g.append(ratio.real)
        C = H.coefficient(0).to_numpy() if not H.coefficient(0).is_zero() else np.zeros((1, 2, 2), complex)
        return cls(tuple(xi), tuple(eta), tuple(g), K, C)

    def xi_at(self, x):
        return _poly_eval(self.xi, x).real

    def dxi_at(self, x):
        return _poly_eval([k * c for k, c in enumerate(self.xi)][1:], x).real

    def d2xi_at(self, x):
        return _poly_eval([k * (k - 1) * c for k, c in enumerate(self.xi)][2:], x).real

    def eta_at(self, x):
        return _poly_eval(self.eta, x)

    def g_at(self, x):
        return _poly_eval(self.g, x).real

    def B_at(self, x):
        x = np.asarray(x, dtype=float)
        return self.eta_at(x)[..., None, None] * IDENTITY + self.g_at(x)[..., None, None] * self.K

    def dB_at(self, x):
        deta = [k * c for k, c in enumerate(self.eta)][1:] or [0]
        dg = [k * c for k, c in enumerate(self.g)][1:] or [0]
        x = np.asarray(x, dtype=float)
        return _poly_eval(deta, x)[..., None, None] * IDENTITY + _poly_eval(dg, x).real[..., None, None] * self.K

    def C_at(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros(x.shape + (2, 2), complex)
        for c in self.C[::-1]:
            out = out * x[..., None, None] + c
        return out


def expm_traceless(K: np.ndarray, s):
    """``exp(s K)`` for traceless 2x2 ``K`` (``K^2 = k^2 I``), vectorized in ``s``.

    Uses ``cosh(s k) I + sinh(s k)/k K`` with principal ``k``; the series form
    covers ``k^2 = 0`` (nilpotent K) and small arguments.
    """
    s = np.asarray(s, dtype=complex)
    k2 = complex(0.5 * np.trace(K @ K))
    k = np.sqrt(k2)
    z = s * k
    small = np.abs(z) < 1e-6
    zz = np.where(small, 1.0, z)
    ch = np.where(small, 1 + z * z / 2 + z**4 / 24, np.cosh(zz))
    sh_over_k = np.where(small, s * (1 + z * z / 6 + z**4 / 120), np.sinh(zz) / np.where(small, 1.0, k if k != 0 else 1.0))
    return ch[..., None, None] * IDENTITY + sh_over_k[..., None, None] * K


def rotate_pauli(v, k, phase):
    """Components of ``E^{-1} (v . sigma) E`` with ``E = exp(phase k . sigma / 2)``.

    The part of ``v`` along ``k`` is left untouched and the rest is rotated by
    ``cosh``/``sinh`` of ``phase sqrt(k^2)``, which avoids the cancellation of
    multiplying large exponentials.  ``v`` may carry leading axes matching ``phase``.
    """
    v = np.asarray(v, dtype=complex)
    k = np.asarray(k, dtype=complex)
    ph = np.asarray(phase, dtype=complex)[..., None]
    G = complex(k @ k)
    kn = float(np.sum(np.abs(k) ** 2))
    if kn == 0:
        return np.broadcast_to(v, np.broadcast_shapes(v.shape, ph.shape)).copy()
    r = np.sqrt(G)
    z = ph * r
    vk = (v @ k)[..., None]
    cr = np.cross(v, k)
    if abs(G) > 1e-10 * kn:
        perp = np.cross(k, cr) / G
        return (v - perp) + np.cosh(z) * perp + 1j * (np.sinh(z) / r) * cr
    # nearly isotropic k: series in z for (cosh-1)/G and sinh/r
    small = np.abs(z) < 1e-3
    zs = np.where(small, 1.0, z)
    chm1_G = np.where(small, ph**2 / 2 * (1 + z**2 / 12), (np.cosh(zs) - 1) / (G if G != 0 else 1))
    sh_r = np.where(small, ph * (1 + z**2 / 6), np.sinh(zs) / (r if r != 0 else 1))
    return v + chm1_G * (G * v - vk * k) + 1j * sh_r * cr


# -- the gauge map -------------------------------------------------------------

def _real_roots(coeffs) -> list[float]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    if len(c) <= 1:
        return []
    r = np.roots(c[::-1])
    return sorted(float(z.real) for z in r if abs(z.imag) <= 1e-12 * max(1.0, abs(z)))


@dataclass
class GaugeMap:
    """Change of variables and gauge factor for an operator ``xi d^2 + B d + C``.

    Parameters
    ----------
    op : OperatorData
    x_ref : float
        Anchor of the integrals in ``U`` and of the phase ``theta``; needs ``xi(x_ref) > 0``.
    x0 : float, optional
        Anchor of ``f`` (``f(x0) = 0``).  Defaults to ``x_ref``; may be a simple
        zero of ``xi`` at an end of the working interval.
    sign : {+1, -1}
        Orientation of ``y``.
    theta_shift : complex
        Constant added to the phase.
    Lambda : SimilarityTransform
    """

    op: OperatorData
    x_ref: float
    x0: float | None = None
    sign: int = 1
    theta_shift: complex = 0.0
    Lambda: SimilarityTransform = field(default_factory=SimilarityTransform.identity)
    margin: float = 1e-9

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if not self.op.xi_at(self.x_ref) > self.margin:
            raise DomainError(f"xi(x_ref) = {self.op.xi_at(self.x_ref)} is not positive")
        roots = _real_roots(self.op.xi)
        lo = max((r for r in roots if r < self.x_ref), default=-math.inf)
        hi = min((r for r in roots if r > self.x_ref), default=math.inf)
        self.interval = (lo, hi)
        if self.x0 is None:
            self.x0 = self.x_ref
        x0 = self.x0
        if not (lo <= x0 <= hi) or (x0 in (lo, hi) and not self._simple_root(x0)):
            raise DomainError(f"f-anchor {x0} outside the working interval {self.interval}")
        self._tail = {}
        self._y_range = (self._limit(-1), self._limit(+1))
        for side, end, lim in ((-1, lo, self._y_range[0]), (1, hi, self._y_range[1])):
            if math.isinf(end) and math.isfinite(lim):
                # primitive value at the infinite end, so far-out points integrate only the tail
                self._tail[side] = self.sign * lim

    # -- domain bookkeeping
    def _simple_root(self, r) -> bool:
        return math.isfinite(r) and abs(self.op.dxi_at(r)) > 1e-9

    def _limit(self, side: int) -> float:
        """``f`` at the end of the working interval on the given side (may be infinite)."""
        end = self.interval[0] if side < 0 else self.interval[1]
        deg = len(self.op.xi) - 1
        if end == self.x0:
            return 0.0
        if math.isinf(end):
            converges = deg > 2
        else:
            converges = self._simple_root(end)
        if not converges:
            return self.sign * side * math.inf
        return self.f_forward(end, _check=False)

    @property
    def y_range(self) -> tuple[float, float]:
        a, b = self._y_range
        return (a, b) if a <= b else (b, a)

    def in_domain(self, x) -> bool:
        lo, hi = self.interval
        if x == self.x0:
            return True
        return lo < x < hi and self.op.xi_at(x) > self.margin

    def _check(self, x):
        if not self.in_domain(x):
            raise DomainError(f"x = {x} outside working interval {self.interval}")

    # -- f and its inverse
    def _inv_sqrt_xi(self, t):
        return 1.0 / math.sqrt(max(self.op.xi_at(t), 0.0)) if self.op.xi_at(t) > 0 else 0.0

    def _F(self, x: float) -> float:
        """Increasing primitive ``int_{x0}^x dt/sqrt(xi)``."""
        near = max(abs(self.x0), abs(self.x_ref)) + 1.0
        if 1 in self._tail and x > near:
            return self._tail[1] - integrate(self._inv_sqrt_xi, x, math.inf)
        if -1 in self._tail and x < -near:
            return self._tail[-1] + integrate(self._inv_sqrt_xi, -math.inf, x)
        return integrate(self._inv_sqrt_xi, self.x0, x)

    def _cumulative(self, fn, anchor: float, xs) -> np.ndarray:
        """``int_anchor^x fn`` at every point of ``xs``, integrating between neighbours."""
        xs = np.asarray(xs, dtype=float)
        flat = np.ravel(xs)
        out = np.empty(flat.shape, dtype=complex)
        order = np.argsort(flat)
        right = [i for i in order if flat[i] >= anchor]
        left = [i for i in order[::-1] if flat[i] < anchor]
        for chain in (right, left):
            prev, acc = anchor, 0.0
            for i in chain:
                acc = acc + integrate(fn, prev, flat[i])
                out[i] = acc
                prev = flat[i]
        if not np.any(out.imag):
            out = out.real
        return out.reshape(xs.shape)

    def f_forward(self, x, _check: bool = True):
        if np.ndim(x):
            if _check:
                for v in np.ravel(x):
                    self._check(float(v))
            return self.sign * self._cumulative(self._inv_sqrt_xi, self.x0, x)
        if _check:
            self._check(x)
        return self.sign * self._F(float(x))

    def _check_y(self, y):
        a, b = self.y_range
        if not (a <= y <= b) or (y in (a, b) and math.isinf(y)):
            raise DomainError(f"y = {y} outside the range {self.y_range} of f")

    def f_inverse(self, y):
        if np.ndim(y):
            return self._f_inverse_many(np.asarray(y, dtype=float))
        self._check_y(y)
        target = self.sign * y
        if target == 0:
            return float(self.x0)
        lo, hi = self.interval
        step = 0.5 * math.sqrt(self.op.xi_at(self.x_ref)) * max(abs(target), 1e-3)
        br = find_bracket(self._F, target, self.x_ref, lo, hi, increasing=True, step=step)
        return invert_monotone(self._F, target, br, dfn=self._inv_sqrt_xi)

    def _f_inverse_many(self, ys: np.ndarray) -> np.ndarray:
        """Vector inverse: one full solve, then short solves between sorted neighbours."""
        flat = np.ravel(ys)
        for v in flat:
            self._check_y(float(v))
        targets = self.sign * flat
        out = np.empty(flat.shape)
        if flat.size == 0:
            return out.reshape(ys.shape)
        order = np.argsort(targets)
        lo, hi = self.interval
        start = order[np.argmin(np.abs(targets[order]))]
        x_start = self.f_inverse(float(flat[start]))
        out[start] = x_start
        pos = int(np.where(order == start)[0][0])
        for chain, direction in ((order[pos + 1:], +1), (order[:pos][::-1], -1)):
            x_prev, t_prev = x_start, targets[start]
            for i in chain:
                dt = targets[i] - t_prev
                if dt == 0:
                    out[i] = x_prev
                    continue
                F = lambda x, a=x_prev: integrate(self._inv_sqrt_xi, a, x)  # noqa: E731
                step = max(abs(dt) * math.sqrt(max(self.op.xi_at(x_prev), 1e-12)), 1e-12)
                br = find_bracket(F, dt, x_prev, lo, hi, increasing=True, step=step)
                x_prev = invert_monotone(F, dt, br, dfn=self._inv_sqrt_xi, ytol=1e-13)
                out[i] = x_prev
                t_prev = targets[i]
        return out.reshape(ys.shape)

    # -- phases and U
    def _int_over_xi(self, fn, x):
        return integrate(lambda t: fn(t) / self.op.xi_at(t), self.x_ref, x)

    def _over_xi_many(self, fn, x):
        for v in np.ravel(x):
            self._check(float(v))
        return self._cumulative(lambda t: fn(t) / self.op.xi_at(t), self.x_ref, x)

    def theta(self, x):
        """``-int_{x_ref}^x dt/xi + theta_shift`` as a function of ``x``."""
        if np.ndim(x):
            return -self._over_xi_many(lambda t: 1.0, x) + self.theta_shift
        self._check(x)
        return -self._int_over_xi(lambda t: 1.0, x) + self.theta_shift

    def theta_y(self, y):
        return self.theta(self.f_inverse(y))

    def phase(self, x):
        """``-int g/xi + theta_shift``; equals ``theta`` when ``g = 1``."""
        if np.ndim(x):
            return -self._over_xi_many(self.op.g_at, x) + self.theta_shift
        self._check(x)
        return -self._int_over_xi(self.op.g_at, x) + self.theta_shift

    def E(self, x):
        """Matrix factor ``exp(phase(x) K / 2)``."""
        return expm_traceless(self.op.K, 0.5 * np.asarray(self.phase(x)))

    def scalar_factor(self, x):
        if np.ndim(x):
            x = np.asarray(x, dtype=float)
            return self.op.xi_at(x) ** 0.25 * np.exp(-0.5 * self._over_xi_many(self.op.eta_at, x))
        self._check(x)
        return self.op.xi_at(x) ** 0.25 * np.exp(-0.5 * self._int_over_xi(self.op.eta_at, x))

    def U(self, x):
        s = np.asarray(self.scalar_factor(x))
        return s[..., None, None] * (self.E(x) @ self.Lambda.matrix)

    def inverse_scalar_factor(self, x):
        """``1 / scalar_factor``, computed directly so that decay underflows to zero."""
        if np.ndim(x):
            x = np.asarray(x, dtype=float)
            return self.op.xi_at(x) ** -0.25 * np.exp(0.5 * self._over_xi_many(self.op.eta_at, x))
        self._check(x)
        return self.op.xi_at(x) ** -0.25 * np.exp(0.5 * self._int_over_xi(self.op.eta_at, x))

    def U_inv(self, x):
        s = np.asarray(self.inverse_scalar_factor(x))
        Ei = expm_traceless(self.op.K, -0.5 * np.asarray(self.phase(x)))
        return (self.Lambda.inverse @ Ei) * s[..., None, None]

    def conj(self, x, A):
        """``(E Lambda)^{-1} A (E Lambda)``; scalar factors of U cancel."""
        A = np.asarray(A, dtype=complex)
        ph = np.asarray(self.phase(x))
        tr = 0.5 * np.trace(A, axis1=-2, axis2=-1)
        rot = rotate_pauli(pauli_components(A), pauli_components(self.op.K), ph)
        inner = tr[..., None, None] * IDENTITY + np.einsum("...i,ijk->...jk", rot, SIGMA)
        return self.Lambda.conjugate(inner)

    # -- potential and basis
    def potential_x(self, x):
        """``V`` at the point ``x`` via the general formula for any ``xi``."""
        x = np.asarray(x, dtype=float)
        for v in np.ravel(x):
            self._check(float(v))
        op = self.op
        xi, dxi, d2xi = op.xi_at(x), op.dxi_at(x), op.d2xi_at(x)
        B, dB = op.B_at(x), op.dB_at(x)
        M = (-(B @ B) / (4 * xi)[..., None, None] - dB / 2
             + (dxi / (2 * xi))[..., None, None] * B + op.C_at(x))
        scalar = d2xi / 4 - 3 * dxi**2 / (16 * xi)
        return self.conj(x, M) + scalar[..., None, None] * IDENTITY

    def potential(self, y):
        return self.potential_x(self.f_inverse(y))

    def ode_residual(self, x, h: float = 1e-3) -> float:
        """``|U' - (xi'/2 - B) U / (2 xi)|`` relative to ``|U|``.

        ``U'`` comes from the five-point central stencil.  The step is capped
        by ``h``, by a five-hundredth of the distance to the nearest end of
        the working interval and by a five-hundredth of the local length
        scale ``1/|A|`` of the coefficient ``A = (xi'/2 - B) / (2 xi)``, so
        that rapidly varying regions near roots of ``xi`` are resolved.
        """
        op = self.op
        A = (0.5 * op.dxi_at(x) * IDENTITY - op.B_at(x)) / (2 * op.xi_at(x))
        dist = min(abs(x - e) for e in self.interval)
        h = min(h, 0.002 * dist, 0.002 / max(np.abs(A).max(), 1e-300))
        Us = self.U(x + h * np.array([-2.0, -1.0, 0.0, 1.0, 2.0]))
        dU = (Us[0] - 8 * Us[1] + 8 * Us[3] - Us[4]) / (12 * h)
        U0 = Us[2]
        return float(np.abs(dU - A @ U0).max() / max(1e-300, np.abs(U0).max()))

    def basis_values(self, b: InvariantBasis, y) -> np.ndarray:
        """``psi_i(y) = U^{-1}(x) r_i(x)`` for all basis vectors; shape ``(dim,) + y.shape + (2,)``."""
        x = self.f_inverse(y)
        Ui = self.U_inv(x)
        return np.array([np.einsum("...ab,...b->...a", Ui, r(x)) for r in b.vectors])

    def transform_basis(self, b: InvariantBasis) -> list[Callable]:
        def make(r):
            def psi(y):
                x = self.f_inverse(y)
                return np.einsum("...ab,...b->...a", self.U_inv(x), r(x))
            return psi
        return [make(r) for r in b.vectors]


def gauge_from_operator(H: DiffOp, x_ref: float, *, x0: float | None = None, sign: int = 1,
                        Lambda: SimilarityTransform | None = None,
                        theta_shift: complex = 0.0) -> GaugeMap:
    return GaugeMap(OperatorData.from_diffop(H), x_ref, x0=x0, sign=sign, theta_shift=theta_shift,
                    Lambda=Lambda or SimilarityTransform.identity())


def default_anchor(p: QESParams) -> float:
    """A point with ``xi > 0``: 0 if admissible, else the middle of a positive region."""
    if p.xi(0.0) > 1e-9:
        return 0.0
    roots = _real_roots(p.alpha)
    cands = []
    if roots:
        cands += [roots[0] - 1.0, roots[-1] + 1.0]
        cands += [0.5 * (a + b) for a, b in zip(roots, roots[1:])]
    for c in sorted(cands, key=abs):
        if p.xi(c) > 1e-9:
            return float(c)
    raise DomainError("xi is nowhere positive")


def solve_gauge(p: QESParams, x_ref: float | None = None, *, x0: float | None = None,
                sign: int = 1, Lambda: SimilarityTransform | None = None,
                theta_shift: complex = 0.0) -> GaugeMap:
    """Gauge map for the QES Hamiltonian of ``p``; ``x_ref`` must satisfy ``xi > 0``."""
    if x_ref is None:
        x_ref = default_anchor(p)
    if not p.xi(x_ref) > 0:
        raise DomainError(f"xi({x_ref}) = {p.xi(x_ref)} is not positive")
    return gauge_from_operator(build_hamiltonian(p), x_ref, x0=x0, sign=sign, Lambda=Lambda,
                               theta_shift=theta_shift)


# -- closed-form potential routes -----------------------------------------------

class PotentialFn:
    """Callable ``y -> V(y)`` (2x2, or stacked for arrays) built from an ``x``-space evaluator."""

    def __init__(self, at_x: Callable, gauge: GaugeMap | None = None, *, params=None,
                 case=None, label: str = ""):
        self.at_x = at_x
        self.gauge = gauge
        self.params = params
        self.case = case
        self.label = label

    def __call__(self, y):
        if self.gauge is None:
            return self.at_x(np.asarray(y, dtype=float))
        return self.at_x(self.gauge.f_inverse(y))


def _pointwise(fn):
    """Let an ``x``-space evaluator written for arrays accept scalars too."""
    @functools.wraps(fn)
    def wrapper(p, g, x):
        x = np.asarray(x, dtype=float)
        out = fn(p, g, np.atleast_1d(x))
        return out.reshape(x.shape + out.shape[-2:])
    return wrapper


@_pointwise
def potential_general_x(p: QESParams, g: GaugeMap, x):
    """The structured route: scalar polynomial part plus conjugated Pauli terms."""
    x = np.asarray(x, dtype=float)
    a0, a1, a2 = p.alpha
    b0, b1, b2 = p.beta
    m = p.m
    xi, dxi, eta, deta = p.xi(x), p.dxi(x), p.eta(x), p.deta(x)
    gt = p.gamma_tilde
    gs = pauli_matrix(gt)
    ph = np.asarray(g.theta(x))
    s1 = np.einsum("...i,ijk->...jk", rotate_pauli([1, 0, 0], gt, ph), SIGMA)
    s3 = np.einsum("...i,ijk->...jk", rotate_pauli([0, 0, 1], gt, ph), SIGMA)
    sc = (-eta**2 + 2 * dxi * eta - 2 * xi * deta - 4 * b2 * (m - 1) * x * xi - p.gamma_sq)
    W = (sc[..., None, None] * IDENTITY + (2 * (dxi - eta))[..., None, None] * gs
         + (4 * b2 * xi)[..., None, None] * s1 + ((4 * b2 * x + 2 * p.delta) * xi)[..., None, None] * s3)
    W = W / (4 * xi)[..., None, None]
    return g.Lambda.conjugate(W) + (a2 / 2 - 3 * dxi**2 / (16 * xi))[..., None, None] * IDENTITY


@_pointwise
def potential_expanded_x(p: QESParams, g: GaugeMap, x):
    """The fully expanded route with ``cosh``/``sinh`` of ``theta sqrt(gamma~^2)``.

    Needs ``gamma~^2 != 0``.  The constant term multiplying ``gamma~ . sigma / gamma~^2``
    is ``(2 alpha1 - 2 beta0) gamma~^2 + 4 alpha0 beta2 gamma1 + 2 delta alpha0 gamma3``.
    """
    x = np.asarray(x, dtype=float)
    a0, a1, a2 = p.alpha
    b0, b1, b2 = p.beta
    g1, g2, g3 = p.gamma
    m, d, G = p.m, p.delta, p.gamma_sq
    if G == 0:
        raise ValueError("expanded route needs gamma~^2 != 0; use the structured route")
    s1, s2, s3 = SIGMA
    gs = pauli_matrix(p.gamma_tilde)
    xi, dxi = p.xi(x), p.dxi(x)
    th = np.asarray(g.theta(x), dtype=complex)
    r = np.sqrt(G)
    sh, ch = np.sinh(th * r), np.cosh(th * r)

    def bc(v):
        return np.asarray(v)[..., None, None]

    poly = (-b2**2 * x**4 - (2 * b1 * b2 + 4 * a2 * b2 * (m - 1)) * x**3
            + (2 * a2 * b1 - 2 * a1 * b2 - b1**2 - 2 * b0 * b2 - 4 * a1 * b2 * (m - 1)) * x**2
            + (4 * a2 * b0 - 2 * b0 * b1 - 4 * m * a0 * b2) * x + 2 * a1 * b0 - 2 * a0 * b1 - b0**2)
    M = bc(poly - G) * IDENTITY
    M = M + bc(4 * x * xi) * (b2 * g3 / G * gs
                              + bc(sh / r) * (b2 * (g2 * s1 + 1j * g1 * s2))
                              + bc(ch / G) * (b2 * (-g1 * g3 * s1 - 1j * g2 * g3 * s2
                                                    + (g1**2 - g2**2) * s3)))
    M = M + bc(2 * xi) * (
        bc(sh / r) * (d * g2 * s1 + 1j * (d * g1 - 2 * b2 * g3) * s2 - 2 * b2 * g2 * s3)
        + bc(ch / G) * ((2 * b2 * (g3**2 - g2**2) - d * g1 * g3) * s1
                        - 1j * (2 * b2 * g1 * g2 + d * g2 * g3) * s2
                        + (d * (g1**2 - g2**2) - 2 * b2 * g1 * g3) * s3))
    lin = ((-2 * b2 * G + 4 * a2 * b2 * g1 + 2 * d * a2 * g3) * x**2
           + ((4 * a2 - 2 * b1) * G + 4 * a1 * b2 * g1 + 2 * d * a1 * g3) * x
           + (2 * a1 - 2 * b0) * G + 4 * a0 * b2 * g1 + 2 * d * a0 * g3)
    M = M + bc(lin / G) * gs
    return g.Lambda.conjugate(M / bc(4 * xi)) + bc(a2 / 2 - 3 * dxi**2 / (16 * xi)) * IDENTITY


def potential_general(p: QESParams, Lambda: SimilarityTransform | None = None,
                      gauge: GaugeMap | None = None, **gauge_kw) -> PotentialFn:
    """``V(y)`` through the structured formula; ``Lambda`` overrides the gauge's."""
    if gauge is None:
        gauge = solve_gauge(p, Lambda=Lambda, **gauge_kw)
    elif Lambda is not None:
        gauge = replace(gauge, Lambda=Lambda)
    return PotentialFn(lambda x: potential_general_x(p, gauge, x), gauge, params=p, label="general")


def potential_expanded(p: QESParams, Lambda: SimilarityTransform | None = None,
                       gauge: GaugeMap | None = None, **gauge_kw) -> PotentialFn:
    if gauge is None:
        gauge = solve_gauge(p, Lambda=Lambda, **gauge_kw)
    elif Lambda is not None:
        gauge = replace(gauge, Lambda=Lambda)
    return PotentialFn(lambda x: potential_expanded_x(p, gauge, x), gauge, params=p, label="expanded")


def potential_from_operator(gauge: GaugeMap) -> PotentialFn:
    return PotentialFn(gauge.potential_x, gauge, label="operator")


def fit_theta_shift(V_ref: Callable, V_shifted: Callable[[float, complex], np.ndarray],
                    xs, guess: complex = 0.0):
    """Per-point constant ``c`` making ``V_shifted(x, c)`` match ``V_ref(x)``.

    Returns the fitted values; callers assert they agree (a genuine constant).
    """
    from scipy.optimize import least_squares

    out = []
    for x in xs:
        target = V_ref(x)

        def resid(v):
            d = V_shifted(x, complex(v[0], v[1])) - target
            return np.concatenate([d.real.ravel(), d.imag.ravel()])

        sol = least_squares(resid, [complex(guess).real, complex(guess).imag], xtol=1e-14, ftol=1e-14)
        out.append(complex(sol.x[0], sol.x[1]))
    return np.array(out)


# -- CSV -------------------------------------------------------------------------

CSV_HEADER = ("y", "V11re", "V11im", "V12re", "V12im", "V21re", "V21im", "V22re", "V22im")


def potential_rows(V: Callable, ys) -> list[list[float]]:
    rows = []
    for y in ys:
        M = np.asarray(V(float(y)))
        row = [float(y)]
        for z in M.ravel():
            row += [float(z.real), float(z.imag)]
        rows.append(row)
    return rows
