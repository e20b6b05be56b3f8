"""Numeric kernels: quadrature, monotone inversion, finite differences, grid spectra."""
from __future__ import annotations

import math
import warnings
from typing import Callable

import numpy as np
from scipy import integrate as _spi
from scipy.linalg import eig_banded


class IntegrationError(ArithmeticError):
    pass


class BracketError(ValueError):
    pass


def _quad(part, a, b, tol, limit):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _spi.IntegrationWarning)
        val, err = _spi.quad(part, a, b, epsabs=tol, epsrel=tol, limit=limit, full_output=True)[:2]
    return val, err


def _ok(val, err, tol):
    return np.isfinite(val) and err <= max(1e3 * tol, 1e-9 * abs(val))


def _quad_split(part, a, b, tol, limit, depth):
    """quad on [a, b], bisecting failed finite pieces up to ``depth`` times."""
    val, err = _quad(part, a, b, tol, limit)
    if _ok(val, err, tol) or depth == 0 or not (math.isfinite(a) and math.isfinite(b)):
        return val, err
    mid = 0.5 * (a + b)
    v1, e1 = _quad_split(part, a, mid, tol, limit, depth - 1)
    v2, e2 = _quad_split(part, mid, b, tol, limit, depth - 1)
    return v1 + v2, e1 + e2


def integrate(fn: Callable[[float], complex], a: float, b: float, tol: float = 1e-12,
              limit: int = 200, depth: int = 10) -> complex:
    """Adaptive quadrature of a real- or complex-valued function on [a, b].

    Infinite limits and integrable endpoint singularities (1/sqrt) are allowed.
    Finite intervals on which a single ``quad`` call misses the tolerance are
    bisected, at most ``depth`` levels deep.  Returns a float when ``fn`` is
    real on the sample points, otherwise complex.
    """
    if a == b:
        return 0.0
    if math.isinf(b) and math.isfinite(a) and abs(a) > 1.0:
        # rescale t = a s so that quad's tail transform sees a unit-size start
        return abs(a) * integrate(lambda s: fn(abs(a) * s), math.copysign(1.0, a), b, tol, limit, depth)
    if math.isinf(a) and math.isfinite(b) and abs(b) > 1.0:
        return abs(b) * integrate(lambda s: fn(abs(b) * s), a, math.copysign(1.0, b), tol, limit, depth)
    probe = fn(0.5 * (a + b)) if math.isfinite(a) and math.isfinite(b) else fn(
        a + 1.0 if math.isfinite(a) else (b - 1.0 if math.isfinite(b) else 0.0))
    parts = [lambda t: float(np.real(fn(t)))]
    if np.iscomplexobj(probe) and np.imag(probe) != 0 or isinstance(probe, complex):
        parts.append(lambda t: float(np.imag(fn(t))))
    vals = []
    for part in parts:
        val, err = _quad_split(part, a, b, tol, limit, depth)
        if not _ok(val, err, 10 * tol):
            raise IntegrationError(f"quadrature did not converge on [{a}, {b}] (err={err:.2e})")
        vals.append(val)
    return vals[0] if len(vals) == 1 else complex(vals[0], vals[1])


def invert_monotone(fn: Callable[[float], float], y: float, bracket: tuple[float, float],
                    dfn: Callable[[float], float] | None = None, *, ytol: float = 1e-11,
                    maxiter: int = 200) -> float:
    """Solve ``fn(x) = y`` for strictly monotone ``fn`` on a finite bracket.

    Newton steps (when ``dfn`` is given) safeguarded by bisection.
    """
    lo, hi = bracket
    flo, fhi = fn(lo) - y, fn(hi) - y
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        raise BracketError(f"y={y} is not bracketed by fn on [{lo}, {hi}]")
    if flo > 0:
        lo, hi, flo, fhi = hi, lo, fhi, flo
    x = 0.5 * (lo + hi)
    fx = fn(x) - y
    scale = max(1.0, abs(y))
    for _ in range(maxiter):
        if abs(fx) <= ytol * scale:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        step_ok = False
        if dfn is not None:
            d = dfn(x)
            if d != 0 and np.isfinite(d):
                xn = x - fx / d
                if min(lo, hi) < xn < max(lo, hi):
                    x, step_ok = xn, True
        if not step_ok:
            x = 0.5 * (lo + hi)
        if abs(hi - lo) <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            return x
        fx = fn(x) - y
    return x


def find_bracket(fn, y, start: float, lo: float, hi: float, increasing: bool = True,
                 step: float = 1.0, grow: float = 2.0, maxexpand: int = 200) -> tuple[float, float]:
    """Expand outward from ``start`` within (lo, hi) until ``fn - y`` changes sign."""
    f0 = fn(start) - y
    if f0 == 0:
        return start, start
    go_right = (f0 < 0) == increasing
    a = start
    h = step
    for _ in range(maxexpand):
        if go_right:
            b = a + h
            if b >= hi:
                b = hi if math.isfinite(hi) else b
                if math.isfinite(hi):
                    # approach the open end geometrically
                    b = a + 0.5 * (hi - a)
        else:
            b = a - h
            if b <= lo:
                if math.isfinite(lo):
                    b = a - 0.5 * (a - lo)
        fb = fn(b) - y
        if (fb > 0) != (f0 > 0) or fb == 0:
            return (a, b) if a < b else (b, a)
        a = b
        h *= grow
    raise BracketError(f"could not bracket y={y}")


def fd_apply(V: Callable, psi: Callable, grid: np.ndarray, order: int = 2):
    """Apply ``d^2/dy^2 + V(y)`` to a 2-component function on a uniform grid.

    Returns ``(points, values)`` for the interior points where the stencil fits;
    ``values`` has shape ``(len(points), 2)``.  ``order`` is 2 (three-point) or 4.
    """
    grid = np.asarray(grid, dtype=float)
    h = grid[1] - grid[0]
    if not np.allclose(np.diff(grid), h, rtol=1e-9, atol=0):
        raise ValueError("grid must be uniform")
    vals = np.asarray(psi(grid))
    if order == 2:
        pts = grid[1:-1]
        d2 = (vals[2:] - 2 * vals[1:-1] + vals[:-2]) / h**2
        core = vals[1:-1]
    elif order == 4:
        pts = grid[2:-2]
        d2 = (-vals[4:] + 16 * vals[3:-1] - 30 * vals[2:-2] + 16 * vals[1:-3] - vals[:-4]) / (12 * h**2)
        core = vals[2:-2]
    else:
        raise ValueError("order must be 2 or 4")
    Vm = np.asarray(V(pts))
    return pts, d2 + np.einsum("kab,kb->ka", Vm, core)


class NonHermitianPotential(ValueError):
    pass


def _grid(interval, n):
    a, b = interval
    h = (b - a) / (n + 1)
    return a + h * np.arange(1, n + 1), h


def grid_spectrum(V: Callable, interval: tuple[float, float], n: int,
                  herm_tol: float = 1e-8) -> np.ndarray:
    """Eigenvalues of the Dirichlet three-point discretization of ``d^2 + V``.

    ``n`` interior points, so the matrix is 2n x 2n; returned ascending.
    """
    y, h = _grid(interval, n)
    Vm = np.asarray(V(y), dtype=complex)
    dev = np.abs(Vm - np.conj(np.swapaxes(Vm, -1, -2))).max()
    if dev > herm_tol * max(1.0, np.abs(Vm).max()):
        raise NonHermitianPotential(f"potential deviates from Hermitian by {dev:.2e}")
    Vm = 0.5 * (Vm + np.conj(np.swapaxes(Vm, -1, -2)))
    # interleaved ordering (y_k, component c) -> 2k + c, bandwidth 2, lower storage
    N = 2 * n
    band = np.zeros((3, N), dtype=complex)
    band[0, 0::2] = Vm[:, 0, 0].real - 2 / h**2
    band[0, 1::2] = Vm[:, 1, 1].real - 2 / h**2
    band[1, 0::2] = Vm[:, 1, 0]
    band[2, :-2] = 1 / h**2
    return eig_banded(band, lower=True, eigvals_only=True)


def grid_convergence(V: Callable, interval, n: int, k: int = 4) -> dict:
    """Top-k eigenvalues on n and 2n points plus the Richardson extrapolation.

    For a second-order scheme the error ratio ``|e_n| / |e_2n|`` should be near 4.
    """
    coarse = grid_spectrum(V, interval, n)[-k:]
    fine = grid_spectrum(V, interval, 2 * n + 1)[-k:]
    extrap = (4 * fine - coarse) / 3
    return {"coarse": coarse, "fine": fine, "extrapolated": extrap,
            "change": np.abs(fine - coarse)}
