"""Gauge map to Schroedinger form and the potential routes."""
import math

import numpy as np
import pytest
from scipy.linalg import expm

from qesmatrix.gauge import (CSV_HEADER, DomainError, GaugeMap, QESParams, build_hamiltonian,
                             expm_traceless, fit_theta_shift, hamiltonian_expanded,
                             potential_expanded_x, potential_from_operator, potential_general,
                             potential_general_x, potential_rows, rotate_pauli, solve_gauge)
from qesmatrix.hermitize import PAULI, pauli_matrix


def random_params(rng, m=None):
    """A general complex parameter set with xi positive somewhere near the origin."""
    c = lambda: complex(rng.normal(), rng.normal())  # noqa: E731
    return QESParams(alpha0=abs(rng.normal()) + 0.5, alpha1=rng.normal(), alpha2=rng.normal(),
                     beta0=c(), beta1=c(), beta2=c(), gamma1=c(), gamma2=c(), gamma3=c(),
                     m=m or int(rng.integers(2, 5)))


def test_params_json_round_trip():
    p = QESParams(alpha0=1, beta1=2 - 1j, gamma3=0.5j, m=3)
    q = QESParams.from_dict(p.to_dict())
    assert q.beta1 == 2 - 1j and q.gamma3 == 0.5j and q.m == 3


def test_params_accept_pairs_and_reject_unknown_keys():
    p = QESParams.from_dict({"alpha0": 1, "beta0": [1, 2], "m": 2})
    assert p.beta0 == 1 + 2j
    with pytest.raises(KeyError):
        QESParams.from_dict({"alpha0": 1, "zeta": 1})


def test_alpha_must_be_real():
    with pytest.raises(ValueError):
        QESParams.from_dict({"alpha0": {"re": 1, "im": 1}})


def test_xi_cannot_vanish():
    with pytest.raises(ValueError):
        QESParams(beta0=1)


def test_forms_and_expanded_hamiltonian_agree():
    p = QESParams(alpha0=2, alpha1=-1, alpha2=3, beta0=1, beta1=-2, beta2=1, gamma1=1,
                  gamma2=-1, gamma3=2, m=3)
    assert build_hamiltonian(p) == hamiltonian_expanded(p)


def test_expm_traceless_matches_scipy(rng):
    for _ in range(10):
        K = pauli_matrix(rng.normal(size=3) + 1j * rng.normal(size=3))
        s = complex(rng.normal(), rng.normal())
        np.testing.assert_allclose(expm_traceless(K, s), expm(s * K), atol=1e-12, rtol=1e-12)


def test_expm_traceless_nilpotent():
    K = pauli_matrix([1, 1j, 0])
    np.testing.assert_allclose(expm_traceless(K, 2.0), np.eye(2) + 2 * K, atol=1e-15)


def test_rotate_pauli_matches_direct_conjugation(rng):
    for _ in range(20):
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        k = rng.normal(size=3) + 1j * rng.normal(size=3)
        ph = complex(rng.normal(), 0.3 * rng.normal())
        E = expm(0.5 * ph * pauli_matrix(k))
        direct = np.linalg.inv(E) @ pauli_matrix(v) @ E
        np.testing.assert_allclose(pauli_matrix(rotate_pauli(v, k, ph)), direct, atol=1e-10)


def test_rotate_pauli_keeps_parallel_part_exactly():
    # at a huge phase the direct product cancels catastrophically, the rotation does not
    k = np.array([1.0, 2.0, 0.5])
    out = rotate_pauli(3 * k, k, 80.0)
    np.testing.assert_allclose(out, 3 * k, rtol=1e-14)


def test_rotate_pauli_isotropic_axis():
    k = np.array([1, 1j, 0])
    v = np.array([0.3, 0.1, 1.0])
    E = np.eye(2) + 0.5 * 0.7 * pauli_matrix(k)
    direct = np.linalg.inv(E) @ pauli_matrix(v) @ E
    np.testing.assert_allclose(pauli_matrix(rotate_pauli(v, k, 0.7)), direct, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_gauge_ode_residual(seed):
    rng = np.random.default_rng(seed)
    p = random_params(rng)
    g = solve_gauge(p)
    lo, hi = g.interval
    xs = np.linspace(max(lo, g.x_ref - 2), min(hi, g.x_ref + 2), 12)[1:-1]
    for x in xs:
        assert g.ode_residual(float(x)) <= 1e-6


def test_f_inverse_round_trip():
    p = QESParams(alpha0=1, alpha2=1, m=2)
    g = solve_gauge(p, 0.0)
    ys = np.linspace(-3, 3, 13)
    xs = g.f_inverse(ys)
    # f = asinh(x) for xi = 1 + x^2
    np.testing.assert_allclose(xs, np.sinh(ys), rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose([g.f_inverse(float(y)) for y in ys], xs, rtol=1e-10, atol=1e-12)


def test_f_with_finite_range():
    # xi = 1 - x^2: y = asin(x) lives in (-pi/2, pi/2)
    g = solve_gauge(QESParams(alpha0=1, alpha2=-1, m=2), 0.0)
    lo, hi = g.y_range
    assert lo == pytest.approx(-math.pi / 2, abs=1e-9) and hi == pytest.approx(math.pi / 2, abs=1e-9)
    assert g.f_inverse(0.5) == pytest.approx(math.sin(0.5), rel=1e-10)
    with pytest.raises(DomainError):
        g.f_inverse(2.0)


def test_anchor_on_simple_root():
    g = solve_gauge(QESParams(alpha1=1, m=2), 1.0, x0=0.0)
    # xi = x, f = 2 sqrt(x)
    assert g.f_forward(4.0) == pytest.approx(4.0, rel=1e-10)


def test_reference_point_needs_positive_xi():
    with pytest.raises(DomainError):
        solve_gauge(QESParams(alpha0=-1, alpha2=1, m=2), 0.0)


def test_example_one_potential_is_exact():
    m = 3
    p = QESParams(alpha0=1, beta2=1, m=m)
    V = potential_general(p, x_ref=0.0)
    ys = np.linspace(-2, 2, 21)
    want = ((-ys**4 / 4 - m * ys)[:, None, None] * np.eye(2) + ys[:, None, None] * PAULI[2]
            + PAULI[0])
    np.testing.assert_allclose(V(ys), want, atol=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_three_routes_agree(seed):
    rng = np.random.default_rng(100 + seed)
    p = random_params(rng)
    g = solve_gauge(p)
    xs = np.linspace(g.x_ref - 0.3, g.x_ref + 0.3, 7)
    xs = xs[[g.in_domain(float(x)) for x in xs]]
    a = g.potential_x(xs)
    b = potential_general_x(p, g, xs)
    c = potential_expanded_x(p, g, xs)
    scale = max(1.0, np.abs(a).max())
    assert np.abs(a - b).max() <= 1e-10 * scale
    assert np.abs(a - c).max() <= 1e-10 * scale


def test_scalar_and_array_inputs_agree():
    p = QESParams(alpha0=1, alpha2=1, beta1=0.5, gamma3=0.4, m=2)
    g = solve_gauge(p, 0.0)
    xs = np.array([-0.4, 0.3])
    arr = potential_general_x(p, g, xs)
    for x, M in zip(xs, arr):
        np.testing.assert_allclose(potential_general_x(p, g, float(x)), M, atol=1e-14)


def test_potential_from_operator_is_callable_in_y():
    g = solve_gauge(QESParams(alpha0=1, beta2=1, m=2), 0.0)
    V = potential_from_operator(g)
    np.testing.assert_allclose(V(0.0), PAULI[0], atol=1e-12)


def test_theta_shift_fit_recovers_constant():
    p = QESParams(alpha0=1, alpha2=1, gamma1=1, gamma3=0.5, m=2)
    g0 = solve_gauge(p, 0.0)
    g1 = solve_gauge(p, 0.0, theta_shift=0.25)
    xs = [-0.5, 0.0, 0.7]

    def shifted(x, c):
        from dataclasses import replace
        return potential_general_x(p, replace(g0, theta_shift=c), x)

    fit = fit_theta_shift(lambda x: potential_general_x(p, g1, x), shifted, xs)
    np.testing.assert_allclose(fit, 0.25, atol=1e-8)


def test_csv_rows_have_nine_columns():
    g = solve_gauge(QESParams(alpha0=1, beta2=1, m=2), 0.0)
    rows = potential_rows(potential_from_operator(g), [0.0, 1.0])
    assert len(CSV_HEADER) == 9
    assert all(len(r) == 9 for r in rows)
    assert rows[0][1:] == pytest.approx([0, 0, 1, 0, 1, 0, 0, 0], abs=1e-12)


def test_gaugemap_rejects_bad_sign():
    g = solve_gauge(QESParams(alpha0=1, m=2), 0.0)
    with pytest.raises(ValueError):
        GaugeMap(g.op, 0.0, sign=2)
