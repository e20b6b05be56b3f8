"""Command-line front end: schemas, exit codes and CSV output."""
import csv
import io
import json

import pytest

from qesmatrix.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_algebra_m3(capsys):
    code, out, _ = run(capsys, "verify-algebra", "--m", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == "qes/1"
    assert doc["casimirs"]["C1"] == "2"
    assert doc["errors"] == []


def test_verify_algebra_with_invariance(capsys):
    code, out, _ = run(capsys, "verify-algebra", "--m", "2", "--invariance")
    doc = json.loads(out)
    assert code == 0 and all(doc["invariance"].values())


def test_example1_potential_csv(capsys):
    code, out, _ = run(capsys, "example", "--id", "1", "--m", "2", "--potential",
                       "--ymin", "-2", "--ymax", "2", "--n", "5")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert len(rows[0]) == 9 and rows[0][0] == "y"
    mid = [float(v) for v in rows[3]]
    assert mid == [0.0, 0, 0, 1, 0, 1, 0, 0, 0]


def test_check_case2_violation(capsys):
    code, out, _ = run(capsys, "check", "--case", "2", "--params", '{"beta2": 1, "alpha0": 1, "m": 2}')
    doc = json.loads(out)
    assert code == 3
    assert not doc["verdict"]["passed"]
    names = [c["name"] for c in doc["verdict"]["conditions"] if not c["passed"]]
    assert "beta2=0" in names


def test_check_admissible(capsys):
    params = '{"alpha0": 1, "alpha2": 1, "beta1": 1, "m": 2}'
    code, out, _ = run(capsys, "check", "--case", "1", "--params", params)
    assert code == 0 and json.loads(out)["verdict"]["passed"]


@pytest.mark.parametrize("params", ['{bad', '[1, 2]', '{"alpha0": 1, "zeta": 2}', '{"alpha0": {"re": 1, "im": 1}}'])
def test_malformed_params_exit_2(capsys, params):
    code, _, err = run(capsys, "check", "--case", "1", "--params", params)
    assert code == 2
    assert "usage error" in err


def test_unknown_subcommand_exit_2(capsys):
    code, _, _ = run(capsys, "plot")
    assert code == 2


def test_build_reports_complex_entries(capsys):
    code, out, _ = run(capsys, "build", "--params", '{"alpha1": 1, "beta2": -1, "beta0": 0.5, "m": 2}')
    doc = json.loads(out)
    assert code == 0
    assert doc["dim"] == 4
    assert doc["M"][0][3] == {"re": 3.0, "im": 0.0}
    assert all(abs(z["im"]) < 1e-9 for z in doc["eigenvalues"])


def test_build_with_violated_case(capsys):
    code, _, _ = run(capsys, "build", "--params", '{"alpha0": 1, "beta2": 1, "m": 2}', "--case", "2")
    assert code == 3


def test_potential_domain_errors_are_blank(capsys):
    code, out, err = run(capsys, "potential", "--params", '{"alpha0": 1, "alpha2": -1, "m": 2}',
                         "--ymin", "0", "--ymax", "5", "--n", "3")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[2][1:] == [""] * 8 and rows[3][1:] == [""] * 8
    assert "outside" in err


def test_potential_case_route(capsys):
    params = '{"alpha0": 1, "alpha2": 1, "beta1": 1, "m": 2}'
    code, out, _ = run(capsys, "potential", "--params", params, "--case", "1", "--n", "3")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 4
    # Hermitian: V12 = conj(V21)
    for r in rows[1:]:
        v = [float(t) for t in r]
        assert v[3] == pytest.approx(v[5]) and v[4] == pytest.approx(-v[6])


def test_potential_case_violation(capsys):
    code, out, _ = run(capsys, "potential", "--params", '{"alpha0": 1, "gamma3": 1, "m": 2}',
                       "--case", "1", "--n", "3")
    assert code == 3 and json.loads(out)["verdict"]["case"] == "1"


def test_spectrum_example2_grid(capsys):
    code, out, _ = run(capsys, "spectrum", "--id", "2", "--m", "2", "--grid", "600")
    doc = json.loads(out)
    assert code == 0
    assert doc["real"] and doc["grid"]["passed"]


def test_spectrum_needs_input(capsys):
    code, _, _ = run(capsys, "spectrum")
    assert code == 2


def test_hermitize_success_and_refusal(capsys):
    code, out, _ = run(capsys, "hermitize", "--vectors", '[[1, {"re": 0, "im": 1}, 1]]')
    assert code == 0 and json.loads(out)["hermitian"]
    code, out, _ = run(capsys, "hermitize", "--vectors", '[[1, {"re": 0, "im": 1}, 0]]')
    doc = json.loads(out)
    assert code == 3 and doc["condition"] == "a^2>0"


def test_example_hermiticity_json_has_no_nan(capsys):
    code, out, _ = run(capsys, "example", "--id", "1", "--m", "2", "--hermiticity")
    doc = json.loads(out)
    assert doc["hermiticity"]["interval"][0] is None
    assert doc["hermiticity"]["hermitian"] is False


def test_params_from_file(capsys, tmp_path):
    f = tmp_path / "p.json"
    f.write_text('{"alpha0": 1, "alpha2": 1, "beta1": 1, "m": 2}')
    code, _, _ = run(capsys, "check", "--case", "1", "--params", f"@{f}")
    assert code == 0
