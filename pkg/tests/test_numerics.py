"""Quadrature, monotone inversion, finite differences and grid spectra."""
import math

import numpy as np
import pytest

from qesmatrix.numerics import (BracketError, IntegrationError, NonHermitianPotential, fd_apply,
                                find_bracket, grid_convergence, grid_spectrum, integrate,
                                invert_monotone)

S1 = np.array([[0, 1], [1, 0]], dtype=complex)


def test_integrate_sqrt_singularity():
    assert integrate(lambda t: 1 / math.sqrt(t), 0.0, 4.0) == pytest.approx(4.0, rel=1e-12)


def test_integrate_complex():
    val = integrate(lambda t: complex(math.cos(t), math.sin(t)), 0.0, math.pi)
    assert val == pytest.approx(2j, abs=1e-12)


def test_integrate_far_tail():
    # the tail transform is rescaled so a large finite start still converges
    a = 4.3e4
    got = integrate(lambda t: 1 / math.sqrt(t**3 + t), a, math.inf)
    assert got == pytest.approx(2 / math.sqrt(a), rel=1e-6)


def test_integrate_divergent_raises():
    with pytest.raises(IntegrationError):
        integrate(lambda t: 1 / t, 0.0, 1.0)


def test_invert_monotone():
    x = invert_monotone(math.atan, 1.0, (0.0, 10.0), dfn=lambda t: 1 / (1 + t * t))
    assert x == pytest.approx(math.tan(1.0), rel=1e-10)


def test_find_bracket_respects_finite_end():
    lo, hi = find_bracket(lambda x: -math.log(1 - x), 5.0, 0.0, -1.0, 1.0)
    assert 0 <= lo < hi < 1


def test_invert_needs_a_bracket():
    with pytest.raises(BracketError):
        invert_monotone(lambda t: t, 5.0, (0.0, 1.0))


def test_fd_second_derivative_of_square():
    grid = np.linspace(-1, 1, 41)
    V = lambda y: np.zeros(np.shape(y) + (2, 2))  # noqa: E731
    psi = lambda y: np.stack([y**2, 0 * y], axis=-1)  # noqa: E731
    pts, vals = fd_apply(V, psi, grid)
    np.testing.assert_allclose(vals[:, 0], 2.0, atol=1e-10)


def test_fd_potential_term():
    grid = np.linspace(0, 1, 11)
    V = lambda y: np.broadcast_to(S1, np.shape(y) + (2, 2))  # noqa: E731
    psi = lambda y: np.stack([0 * y, 1 + 0 * y], axis=-1)  # noqa: E731
    _, vals = fd_apply(V, psi, grid, order=4)
    np.testing.assert_allclose(vals, np.tile([1, 0], (len(vals), 1)), atol=1e-12)


def test_fd_rejects_nonuniform_grid():
    with pytest.raises(ValueError):
        fd_apply(lambda y: 0, lambda y: y, np.array([0, 0.1, 0.3]))


def zero(y):
    return np.zeros(np.shape(y) + (2, 2), dtype=complex)


def test_particle_in_a_box():
    ev = grid_spectrum(zero, (0, math.pi), 400)
    # d^2 with Dirichlet ends: eigenvalues -k^2, each twice (two decoupled channels)
    assert ev[-1] == pytest.approx(-1.0, abs=1e-4)
    assert ev[-2] == pytest.approx(-1.0, abs=1e-4)
    assert ev[-3] == pytest.approx(-4.0, abs=1e-3)


def test_box_convergence_order_two():
    e1 = abs(grid_spectrum(zero, (0, math.pi), 100)[-1] + 1)
    e2 = abs(grid_spectrum(zero, (0, math.pi), 201)[-1] + 1)
    assert 3.5 < e1 / e2 < 4.5


def test_coupled_constant_potential():
    # V = sigma1 shifts the two channels by +1 and -1
    V = lambda y: np.broadcast_to(S1, np.shape(y) + (2, 2))  # noqa: E731
    ev = grid_spectrum(V, (0, math.pi), 400)
    assert ev[-1] == pytest.approx(0.0, abs=1e-4)
    assert ev[-2] == pytest.approx(-2.0, abs=1e-4)


def test_non_hermitian_refused():
    V = lambda y: np.broadcast_to(np.array([[0, 1], [0, 0]], complex), np.shape(y) + (2, 2))  # noqa: E731
    with pytest.raises(NonHermitianPotential):
        grid_spectrum(V, (0, 1), 10)


def test_grid_convergence_report():
    rep = grid_convergence(zero, (0, math.pi), 100, k=2)
    assert np.all(np.abs(rep["extrapolated"] + 1) < np.abs(rep["fine"] + 1))
