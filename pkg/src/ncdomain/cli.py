"""Command-line front end.

Exit codes: 0 success / equivalent, 1 inequivalent, 2 input error,
3 resource guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .classify import ArityMismatch, classify, operator_witness_check
from . import fock, geometry
from .errors import NCDomainError, ResourceLimitError, SymbolSyntaxError
from .symbol import format_fraction, format_symbol, format_word, parse_symbol

EXIT_OK = 0
EXIT_INEQUIVALENT = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


class UsageError(NCDomainError):
    pass


def read_symbol(arg: str):
    if arg.startswith("@"):
        with open(arg[1:], encoding="utf-8") as fh:
            arg = fh.read()
    return parse_symbol(arg)


def complex_list(text: str) -> list:
    try:
        return [complex(part.strip().replace(" ", "")) for part in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot read {text!r} as a comma-separated list of numbers") from exc


def _level(args, f) -> int:
    N = f.degree + 3 if args.N is None else args.N
    if N < 0:
        raise UsageError("--N must be nonnegative")
    return N


def _tol(args) -> float:
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    return args.tol


def _emit(args, data, lines):
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        for line in lines:
            print(line)


def _cplx(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}j"


def _vec(v) -> str:
    return "(" + ", ".join(_cplx(z) for z in v) + ")"


def cmd_validate(args):
    f = read_symbol(args.symbol)
    _emit(
        args,
        {"canonical": format_symbol(f), "n": f.n, "degree": f.degree, "terms": len(f.terms)},
        [f"valid: n={f.n}, degree={f.degree}, terms={len(f.terms)}", f"canonical: {format_symbol(f)}"],
    )
    return EXIT_OK


def cmd_weights(args):
    f = read_symbol(args.symbol)
    table = fock.compute_weights(f, _level(args, f), args.cap)
    width = max(len(format_word(w)) for w in table.fock.words)
    lines = [f"{format_word(w) if w else '()':<{width}}  {format_fraction(b)}" for w, b in table.weights.items()]
    _emit(args, table.to_json(), lines)
    return EXIT_OK


def cmd_shifts(args):
    f = read_symbol(args.symbol)
    family = fock.build_shifts(f, _level(args, f), args.cap)
    lines = [f"n={family.n}, N={family.fock.N}, dim={family.dim}, order=graded-lex"]
    for j, W in enumerate(family.shifts, start=1):
        coo = W.tocoo()
        order = np.lexsort((coo.row, coo.col))
        lines.append(f"W{j}: {W.nnz} nonzeros")
        for k in order:
            r, c = coo.row[k], coo.col[k]
            lines.append(
                f"  {format_word(family.fock.words[r])} <- {format_word(family.fock.words[c]) if c else '()'}"
                f"  {coo.data[k].real:.15g}"
            )
    _emit(args, family.to_json(), lines)
    return EXIT_OK


def _report_lines(report):
    verdict = "member" if report.member else "not a member"
    return [f"min_eig = {report.min_eig:.6e} (tolerance {report.tolerance:g}, dim {report.dim})", verdict]


def cmd_defect(args):
    f = read_symbol(args.symbol)
    family = fock.build_shifts(f, _level(args, f), args.cap)
    report = fock.is_member(f, family, _tol(args))
    _emit(args, report.to_json(), _report_lines(report))
    return EXIT_OK


def cmd_member(args):
    f = read_symbol(args.symbol)
    if (args.point is None) == (args.tuple is None):
        raise UsageError("give exactly one of --point or --tuple")
    if args.point is not None:
        T = fock.OperatorTuple.scalars(complex_list(args.point))
    else:
        with open(args.tuple, encoding="utf-8") as fh:
            T = fock.OperatorTuple.from_json(json.load(fh))
    report = fock.is_member(f, T, _tol(args))
    _emit(args, report.to_json(), _report_lines(report))
    return EXIT_OK


def cmd_classify(args):
    f = read_symbol(args.f)
    g = read_symbol(args.g)
    result = classify(f, g)
    data = result.to_json()
    if result.equivalent:
        w = result.witness
        lines = [
            "equivalent",
            f"sigma = {list(w.sigma)}",
            f"lambda = [{', '.join(format_fraction(x) for x in w.lam)}]",
            "the domain algebras are completely isometrically isomorphic",
        ]
    else:
        cert = result.certificate
        lines = ["inequivalent"]
        if isinstance(cert, ArityMismatch):
            lines.append(f"arity mismatch: n={cert.n}, m={cert.m}")
        else:
            where = "partial assignment" if cert.sigma is None else f"sigma = {list(cert.sigma)}"
            lines.append(
                f"{where}: coefficient of {format_word(cert.word)} expected "
                f"{format_fraction(cert.expected)}, found {format_fraction(cert.found)}"
            )
        lines.append("the domain algebras are not completely isometrically isomorphic")
    if args.check_operators is not None and result.equivalent:
        report = operator_witness_check(f, g, result.witness, args.check_operators, _tol(args), args.cap)
        data["operator_check"] = report.to_json()
        lines.append("operator check: " + "; ".join(_report_lines(report)))
    _emit(args, data, lines)
    return EXIT_OK if result.equivalent else EXIT_INEQUIVALENT


def cmd_boundary(args):
    f = read_symbol(args.symbol)
    if args.dir is None:
        raise UsageError("--dir is required")
    u = np.asarray(complex_list(args.dir))
    r = geometry.boundary_radius(f, u, args.tol)
    point = r * u / np.linalg.norm(u)
    data = {"radius": r, "point": [[float(z.real), float(z.imag)] for z in point]}
    _emit(args, data, [f"r = {r:.12g}", f"point = {_vec(point)}"])
    return EXIT_OK


def cmd_moebius(args):
    omega = complex_list(args.omega)
    if args.z is not None:
        image = geometry.moebius(omega, complex_list(args.z))
        data = {"image": [[float(z.real), float(z.imag)] for z in image.z], "norm2": image.norm2}
        _emit(args, data, [f"phi(z) = {_vec(image.z)}", f"|phi(z)|^2 = {image.norm2:.12g}"])
    else:
        fit = geometry.circle_image(omega, None, args.m)
        lines = [
            f"center = {_vec(fit.center)}",
            f"radius = {fit.radius:.12g}",
            f"residual = {fit.residual:.3e}",
            f"distance to origin = {fit.distance(np.zeros(len(omega))):.3e}",
        ]
        _emit(args, fit.to_json(), lines)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncdomain", description="Noncommutative domain algebras at desk scale.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="emit JSON")
        p.add_argument("--cap", type=int, default=fock.DEFAULT_CAP, help="maximum Fock dimension")
        return p

    def add_symbol(p):
        p.add_argument("symbol", help="symbol text, or @file")
        p.add_argument("--N", type=int, default=None, help="truncation level (default: degree + 3)")
        p.add_argument("--tol", type=float, default=fock.DEFAULT_TOL)
        return p

    add_symbol(add("validate", cmd_validate, "check a symbol and print its canonical form"))
    add_symbol(add("weights", cmd_weights, "exact weight table"))
    add_symbol(add("shifts", cmd_shifts, "truncated weighted shift matrices"))
    add_symbol(add("defect", cmd_defect, "membership of the universal shifts"))

    p = add_symbol(add("member", cmd_member, "membership of a point or operator tuple"))
    p.add_argument("--point", help="comma-separated scalar point")
    p.add_argument("--tuple", help="JSON file with matrices")

    p = add("classify", cmd_classify, "decide scale-permutation equivalence")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--check-operators", type=int, metavar="N", default=None)
    p.add_argument("--tol", type=float, default=fock.DEFAULT_TOL)

    p = add_symbol(add("boundary", cmd_boundary, "boundary radius of the scalar domain"))
    p.add_argument("--dir", help="comma-separated direction")
    p.set_defaults(tol=1e-12)

    p = add("moebius", cmd_moebius, "ball automorphism and circle images")
    p.add_argument("--omega", required=True)
    p.add_argument("--z", default=None)
    p.add_argument("--m", type=int, default=64)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except SymbolSyntaxError as exc:
        print(f"syntax error: {exc}\n{exc.caret()}", file=sys.stderr)
        return EXIT_INPUT
    except (NCDomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
