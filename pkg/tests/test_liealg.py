"""sl(2) + sl(2) generators: commutation relations, Casimirs and the R identities."""
from fractions import Fraction

import pytest

from qesmatrix.liealg import (build_generators, casimirs, quadratic_forms, structure_constants,
                              verify_all, verify_anticommutation_relations)
from qesmatrix.opalg import exact


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_all_algebra_checks_pass(m):
    rep = verify_all(m)
    assert rep.passed, [c.name for c in rep.failures()]


@pytest.mark.parametrize("m", [2, 3, 7])
def test_casimir_values(m):
    c1, k2 = casimirs(build_generators(m))
    assert c1 == exact(Fraction(m * m - 1, 4))
    assert k2 == exact(Fraction(3, 4))


def test_casimir_for_m3_is_two():
    c1, _ = casimirs(build_generators(3))
    assert str(c1) == "2"


def test_anticommutation_identities_count():
    rep = verify_anticommutation_relations(build_generators(3))
    assert len(rep.checks) == 9
    assert rep.passed


def test_structure_constants_of_t_triple():
    g = build_generators(4)
    sc = structure_constants(g.T)
    # coefficients on (T-, T0, T+): [T-, T0] = T-, [T-, T+] = 2 T0, [T0, T+] = T+
    one, two, zero = exact(1), exact(2), exact(0)
    assert sc[("-", "0")] == [one, zero, zero]
    assert sc[("-", "+")] == [zero, two, zero]
    assert sc[("0", "+")] == [zero, zero, one]


def test_twelve_quadratic_forms():
    forms = quadratic_forms(3)
    assert sorted(forms) == sorted(["A0", "A1", "A2", "B0", "B1", "B2", "C1", "C2", "C3",
                                    "D1", "D2", "D3"])
    # every form has order at most two
    assert all(op.order <= 2 for op in forms.values())


def test_m_must_be_at_least_two():
    with pytest.raises(ValueError):
        build_generators(1)
