"""Command-line front end.

Every subcommand writes JSON (or CSV for potential samples) to stdout and a
short human summary to stderr.  JSON documents carry ``"schema": "qes/1"``,
complex numbers are ``{"re": .., "im": ..}`` and values that could not be
computed are ``null`` with a message in the ``"errors"`` array.

Exit status: 0 when every requested check passes, 1 when a check fails,
2 for usage errors or malformed input, 3 for a parameter set that violates
the constraints of the requested case (or vectors that cannot be made real).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import Callable, Sequence

import numpy as np

from .examples import closure_residual, example2_interval, example_model, hermiticity_of_M
from .families import CaseId, ConstraintViolation, check_constraints, lambda_case, potential_case
from .gauge import (CSV_HEADER, DomainError, QESParams, build_hamiltonian, potential_expanded,
                    potential_general)
from .hermitize import NotReducible, is_hermitian, pauli_matrix, reduce
from .invariant import build_basis, invariance_report, restrict, spectrum
from .liealg import build_generators, casimirs, quadratic_forms, verify_all
from .numerics import grid_spectrum

SCHEMA = "qes/1"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- encoding ------------------------------------------------------------------------

def enc(z, errors: list | None = None, what: str = "value"):
    """JSON form of a complex number; non-finite values become null."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        if errors is not None:
            errors.append(f"{what}: not finite")
        return None
    return {"re": z.real, "im": z.imag}


def enc_matrix(A, errors=None, what="matrix"):
    return [[enc(z, errors, what) for z in row] for row in np.asarray(A, dtype=complex)]


def _emit(doc: dict) -> None:
    doc = {"schema": SCHEMA, **doc}
    doc.setdefault("errors", [])
    json.dump(doc, sys.stdout, allow_nan=False, indent=2)
    sys.stdout.write("\n")


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_json(text: str):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON: {exc}") from None


def _params(text: str, m: int | None = None) -> QESParams:
    d = _load_json(text)
    if not isinstance(d, dict):
        raise UsageError("params must be a JSON object")
    if m is not None:
        d = {**d, "m": m}
    try:
        return QESParams.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad params: {exc}") from None


def _case(text: str) -> CaseId:
    try:
        return CaseId.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- potential sampling ------------------------------------------------------------------------

def _sample(V: Callable, ys: np.ndarray, errors: list) -> list[np.ndarray | None]:
    """``V`` at each point; points outside the domain give None and an error entry."""
    try:
        vals = np.asarray(V(ys), dtype=complex)
        if vals.shape == (len(ys), 2, 2) and np.all(np.isfinite(vals)):
            return list(vals)
    except (DomainError, ArithmeticError, ValueError):
        pass
    out = []
    for y in ys:
        try:
            v = np.asarray(V(float(y)), dtype=complex)
            if not np.all(np.isfinite(v)):
                raise ArithmeticError("not finite")
            out.append(v)
        except (DomainError, ArithmeticError, ValueError) as exc:
            errors.append(f"y={y:g}: {exc}")
            out.append(None)
    return out


def _write_csv(ys, mats) -> None:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for y, M in zip(ys, mats):
        if M is None:
            w.writerow([repr(float(y))] + [""] * 8)
            continue
        row = [repr(float(y))]
        for z in M.ravel():
            row += [repr(float(z.real)), repr(float(z.imag))]
        w.writerow(row)


def _grid(args) -> np.ndarray:
    if args.n < 1:
        raise UsageError("--n must be positive")
    if args.n == 1:
        return np.array([args.ymin])
    return np.linspace(args.ymin, args.ymax, args.n)


# -- subcommands --------------------------------------------------------------------------------

def cmd_verify_algebra(args) -> int:
    rep = verify_all(args.m)
    doc = rep.to_dict()
    c1, k2 = casimirs(build_generators(args.m))
    doc["casimirs"] = {"C1": str(c1), "K2": str(k2)}
    passed = rep.passed
    if args.invariance:
        b = build_basis(args.m)
        inv = {name: all(invariance_report(H, b)) for name, H in quadratic_forms(args.m).items()}
        doc["invariance"] = inv
        passed &= all(inv.values())
    doc["passed"] = passed
    _emit(doc)
    _say(f"m={args.m}: {len(rep.checks)} algebra checks, "
         f"{'all pass' if passed else str(len(rep.failures())) + ' failed'}")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_check(args) -> int:
    p = _params(args.params)
    v = check_constraints(_case(args.case), p, args.tol)
    _emit({"verdict": v.to_dict()})
    if v.passed:
        _say(f"case {v.case.value}: admissible")
        return EXIT_OK
    _say(f"case {v.case.value}: violated {', '.join(v.violated())}")
    return EXIT_VIOLATION


def cmd_build(args) -> int:
    p = _params(args.params)
    errors: list = []
    H = build_hamiltonian(p)
    b = build_basis(p.m)
    M = restrict(H, b).to_numpy()
    ev = spectrum(M)
    doc = {"params": p.to_dict(), "dim": int(M.shape[0]),
           "M": enc_matrix(M, errors, "M"),
           "eigenvalues": [enc(z, errors, "eigenvalue") for z in ev],
           "M_hermitian": is_hermitian(M)}
    if args.case:
        case = _case(args.case)
        v = check_constraints(case, p, args.tol)
        doc["verdict"] = v.to_dict()
        if not v.passed:
            _emit(doc)
            _say(f"case {case.value}: violated {', '.join(v.violated())}")
            return EXIT_VIOLATION
        doc["Lambda"] = enc_matrix(lambda_case(case, p).matrix, errors, "Lambda")
    doc["errors"] = errors
    _emit(doc)
    _say(f"built H for m={p.m}: dim {M.shape[0]}, spectrum {'real' if np.all(np.abs(ev.imag) < 1e-9) else 'complex'}")
    return EXIT_OK


def _potential_fn(args) -> Callable:
    p = _params(args.params)
    kw = {"x_ref": args.x_ref} if args.x_ref is not None else {}
    if args.case:
        case = _case(args.case)
        route = args.route or "case"
        if route == "case":
            return potential_case(case, p, tol=args.tol, **kw)
        v = check_constraints(case, p, args.tol)
        if not v.passed:
            raise ConstraintViolation(v)
        Lam = lambda_case(case, p)
    else:
        route = args.route or "general"
        if route == "case":
            raise UsageError("--route case needs --case")
        Lam = None
    make = potential_general if route == "general" else potential_expanded
    return make(p, Lam, **kw)


def cmd_potential(args) -> int:
    try:
        V = _potential_fn(args)
    except ConstraintViolation as exc:
        _emit({"verdict": exc.verdict.to_dict()})
        _say(str(exc))
        return EXIT_VIOLATION
    ys = _grid(args)
    errors: list = []
    mats = _sample(V, ys, errors)
    _write_csv(ys, mats)
    for e in errors:
        _say(e)
    _say(f"{len(ys)} rows, {len(errors)} outside the domain")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    errors: list = []
    if args.id is not None:
        model = example_model(args.id, args.m)
        M = model.restriction().to_numpy()
        V = model.printed_potential or model.potential
    else:
        if args.params is None:
            raise UsageError("spectrum needs --params or --id")
        p = _params(args.params, args.m)
        M = restrict(build_hamiltonian(p), build_basis(p.m)).to_numpy()
        V = None
        if args.case:
            V = potential_case(_case(args.case), p, tol=args.tol)
    ev = spectrum(M)
    doc = {"algebraic": [enc(z, errors, "eigenvalue") for z in ev],
           "real": bool(np.all(np.abs(ev.imag) <= 1e-9 * max(1.0, np.abs(ev).max())))}
    passed = True
    if args.grid:
        if V is None:
            raise UsageError("--grid needs --id or --case")
        if args.interval:
            a, b = args.interval
        elif args.id == 2:
            L = example2_interval(args.m)
            a, b = -L, L
        else:
            raise UsageError("--grid needs --interval for this model")
        gs = grid_spectrum(V, (a, b), args.grid)
        dist = [float(np.abs(gs - z.real).min()) for z in ev]
        passed = doc["real"] and max(dist) <= args.match_tol
        doc["grid"] = {"n": args.grid, "interval": [a, b], "nearest_distance": dist,
                       "match_tol": args.match_tol, "passed": passed}
        _say(f"grid n={args.grid} on [{a:.3g}, {b:.3g}]: max distance {max(dist):.2e}")
    doc["errors"] = errors
    _emit(doc)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_example(args) -> int:
    model = example_model(args.id, args.m)
    errors: list = []
    if args.potential:
        V = model.printed_potential if (args.route == "printed" and model.printed_potential) else model.potential
        ys = _grid(args)
        mats = _sample(V, ys, errors)
        _write_csv(ys, mats)
        for e in errors:
            _say(e)
        return EXIT_OK
    M = model.restriction().to_numpy()
    doc = {"id": args.id, "m": args.m, "M": enc_matrix(M, errors, "M"),
           "eigenvalues": [enc(z, errors, "eigenvalue") for z in spectrum(M)],
           "notes": list(model.notes)}
    passed = True
    if args.closure:
        ys = np.linspace(args.ymin, args.ymax, max(args.n, 9))
        try:
            res = closure_residual(model, ys)
            doc["closure_residual"] = res
            passed &= res <= args.closure_tol
        except (DomainError, ArithmeticError) as exc:
            doc["closure_residual"] = None
            errors.append(f"closure: {exc}")
            passed = False
    if args.hermiticity:
        verdict = hermiticity_of_M(args.id, args.m)
        d = verdict.to_dict()
        d["interval"] = [None if math.isinf(t) else t for t in d["interval"]]
        if not math.isfinite(d["boundary_max"]):
            d["boundary_max"] = None
        doc["hermiticity"] = d
    doc["errors"] = errors
    _emit(doc)
    _say(f"example {args.id}, m={args.m}: dim {M.shape[0]}")
    return EXIT_OK if passed else EXIT_FAIL


def _vector(v) -> list[complex]:
    if not isinstance(v, list) or len(v) != 3:
        raise UsageError("each vector must be a list of three numbers")
    out = []
    for z in v:
        if isinstance(z, dict):
            out.append(complex(float(z.get("re", 0.0)), float(z.get("im", 0.0))))
        elif isinstance(z, (int, float)) and not isinstance(z, bool):
            out.append(complex(z))
        else:
            raise UsageError(f"not a number: {z!r}")
    return out


def cmd_hermitize(args) -> int:
    data = _load_json(args.vectors)
    if not isinstance(data, list) or not 1 <= len(data) <= 3:
        raise UsageError("--vectors must be a JSON list of one to three vectors")
    vecs = [_vector(v) for v in data]
    errors: list = []
    try:
        out = reduce(vecs)
    except NotReducible as exc:
        _emit({"reducible": False, "condition": exc.condition,
               "value": None if exc.value is None else str(exc.value)})
        _say(f"not reducible: {exc}")
        return EXIT_VIOLATION
    T, images = out[0], out[1:]
    herm = all(is_hermitian(pauli_matrix(v), 1e-12) for v in images)
    _emit({"reducible": True, "Lambda": enc_matrix(T.matrix, errors, "Lambda"),
           "transformed": [[enc(z, errors, "component") for z in v] for v in images],
           "hermitian": herm, "errors": errors})
    _say(f"{len(vecs)} vector(s) brought to real form")
    return EXIT_OK if herm else EXIT_FAIL


# -- parser -----------------------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qesmatrix", description="Hermitian QES 2x2 matrix Schroedinger operators")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("verify-algebra", help="exact algebra checks for one m")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--invariance", action="store_true", help="also check the quadratic forms")
    s.set_defaults(func=cmd_verify_algebra)

    s = sub.add_parser("check", help="constraint verdict for a case")
    s.add_argument("--case", required=True)
    s.add_argument("--params", required=True, help="JSON object or @file")
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("build", help="Hamiltonian, restriction matrix and spectrum")
    s.add_argument("--params", required=True)
    s.add_argument("--case")
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_build)

    def sampling(p):
        p.add_argument("--ymin", type=float, default=-2.0)
        p.add_argument("--ymax", type=float, default=2.0)
        p.add_argument("--n", type=int, default=101)

    s = sub.add_parser("potential", help="sample V(y) as CSV")
    s.add_argument("--params", required=True)
    s.add_argument("--case")
    s.add_argument("--route", choices=("case", "general", "expanded"))
    s.add_argument("--x-ref", type=float, dest="x_ref")
    s.add_argument("--tol", type=float, default=1e-9)
    sampling(s)
    s.set_defaults(func=cmd_potential)

    s = sub.add_parser("spectrum", help="algebraic spectrum, optionally against a grid")
    s.add_argument("--params")
    s.add_argument("--id", type=int, choices=(1, 2, 3, 4))
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--case")
    s.add_argument("--grid", type=int, default=0, help="number of grid points (0: none)")
    s.add_argument("--interval", type=float, nargs=2)
    s.add_argument("--match-tol", type=float, default=1e-3, dest="match_tol")
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("example", help="worked examples")
    s.add_argument("--id", type=int, required=True, choices=(1, 2, 3, 4))
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--potential", action="store_true", help="emit V(y) as CSV")
    s.add_argument("--route", choices=("printed", "gauge"), default="printed")
    s.add_argument("--closure", action="store_true")
    s.add_argument("--closure-tol", type=float, default=1e-4, dest="closure_tol")
    s.add_argument("--hermiticity", action="store_true")
    sampling(s)
    s.set_defaults(func=cmd_example)

    s = sub.add_parser("hermitize", help="bring one to three Pauli vectors to real form")
    s.add_argument("--vectors", required=True, help='JSON list, e.g. [[1,{"re":0,"im":1},0]]')
    s.set_defaults(func=cmd_hermitize)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _say(f"usage error: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        _say(f"cannot read input: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
