"""The four worked models: potentials, bases, closure and boundary behaviour."""
import math

import numpy as np
import pytest

from qesmatrix.examples import (W_Y_MAX, closure_residual, decay_rates, example2_interval,
                                example3_printed_u_inverse, example_model, hermiticity_of_M,
                                w_primitive, weierstrass_w)
from qesmatrix.hermitize import PAULI, is_hermitian
from qesmatrix.invariant import spectrum
from qesmatrix.numerics import grid_spectrum


def test_w_inverts_its_primitive():
    for w in (0.1, 1.0, 7.5):
        assert weierstrass_w(w_primitive(w)) == pytest.approx(w, rel=1e-9)


def test_w_solves_its_ode():
    ys = np.linspace(0.2, 3.4, 60)
    h = 1e-5
    w = weierstrass_w(ys)
    dw = (weierstrass_w(ys + h) - weierstrass_w(ys - h)) / (2 * h)
    assert np.max(np.abs(dw**2 - (w**3 + w)) / (w**3 + w)) <= 1e-6


def test_w_range_is_finite():
    assert W_Y_MAX == pytest.approx(3.7081493546, rel=1e-9)
    with pytest.raises(ValueError):
        weierstrass_w(W_Y_MAX + 0.1)


@pytest.mark.parametrize("m", [2, 3])
def test_example1_closed_form_potential(m):
    model = example_model(1, m)
    ys = np.linspace(-2, 2, 41)
    np.testing.assert_allclose(model.potential(ys), model.printed_potential(ys), atol=1e-9)


def test_example1_potential_at_origin_is_sigma1():
    np.testing.assert_allclose(example_model(1, 2).printed_potential(0.0), PAULI[0], atol=0)


def test_example1_closure_of_printed_basis():
    model = example_model(1, 2)
    ys = np.linspace(-2, 2, 401)
    assert closure_residual(model, ys, potential=model.printed_potential,
                            basis=model.printed_basis) <= 1e-5


def test_example1_matrix_has_complex_pair():
    ev = spectrum(example_model(1, 2).restriction())
    assert np.sum(np.abs(ev.imag) > 1e-6) == 2


def test_example1_not_hermitian_on_half_line():
    v = hermiticity_of_M(1, 2)
    assert v.square_integrable
    assert not v.pairing_holds
    assert not v.hermitian


@pytest.mark.parametrize("m", [2, 3])
def test_example2_printed_and_gauge_potential(m):
    model = example_model(2, m)
    ys = np.linspace(0.2, 3.0, 15)
    np.testing.assert_allclose(model.potential(ys), model.printed_potential(ys), atol=1e-9)


def test_example2_hermitian_matrix_and_basis():
    v = hermiticity_of_M(2, 2)
    assert v.hermitian


@pytest.mark.parametrize("m,frozen", [
    (2, [-2.33441422, -0.74196378, 0.74196378, 2.33441422]),
    (3, [-4.02994405, -1.49514193, -0.15524678, 0.15524678, 1.49514193, 4.02994405]),
])
def test_example2_spectrum_against_grid(m, frozen):
    model = example_model(2, m)
    ev = spectrum(model.restriction())
    assert np.abs(ev.imag).max() < 1e-9
    np.testing.assert_allclose(ev.real, frozen, atol=1e-8)
    L = example2_interval(m)
    gs = grid_spectrum(model.printed_potential, (-L, L), 1500)
    assert max(np.abs(gs - e).min() for e in ev.real) <= 1e-3


def test_example3_potential_and_hermiticity():
    model = example_model(3, 2)
    ys = np.linspace(-1, 2, 31)
    V = model.potential(ys)
    np.testing.assert_allclose(V, model.printed_potential(ys), atol=1e-9)
    assert is_hermitian(V, 1e-10)


def test_example3_gauge_basis_closes():
    model = example_model(3, 2)
    assert closure_residual(model, np.linspace(-1, 2, 301)) <= 1e-4


def test_example3_displayed_inverse_gauge_does_not_close():
    model = example_model(3, 2)
    basis = [lambda y, r=r: np.einsum("...ab,...b->...a", example3_printed_u_inverse(y),
                                      r(np.exp(-np.asarray(y))))
             for r in model.basis_polys.vectors]
    res = closure_residual(model, np.linspace(-1, 2, 301), potential=model.printed_potential,
                           basis=basis)
    assert res > 1.0


def test_example3_decay_rates():
    # first block decays like exp(-y/2); the second block's g_k like exp(-(2k-1) y / 2) for k >= 1
    rates = decay_rates(example_model(3, 2))
    np.testing.assert_allclose(rates, [0.5, 0.5, 0.5, 1.5], atol=5e-3)


def test_example4_printed_potential_matches_gauge():
    model = example_model(4, 2)
    ys = np.linspace(0.3, 3.0, 12)
    np.testing.assert_allclose(model.potential(ys), model.printed_potential(ys), rtol=1e-9, atol=1e-9)


def test_example4_printed_basis_closes_without_sigma1():
    # the displayed basis belongs to Lambda = 1; conjugating the displayed potential by sigma1 restores it
    model = example_model(4, 2)
    S1 = PAULI[0]
    V = lambda y: S1 @ model.printed_potential(y) @ S1  # noqa: E731
    assert closure_residual(model, np.linspace(0.3, 1.8, 301), potential=V,
                            basis=model.printed_basis) <= 1e-4


def test_example4_spectrum_exact():
    ev = spectrum(example_model(4, 2).restriction())
    np.testing.assert_allclose(ev.real, [-6, -math.sqrt(24), math.sqrt(24), 6], atol=1e-12)


def test_example4_basis_not_square_integrable():
    assert not hermiticity_of_M(4, 2).square_integrable


def test_unknown_example():
    with pytest.raises(ValueError):
        example_model(5, 2)
