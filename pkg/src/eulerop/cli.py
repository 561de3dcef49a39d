"""Command-line frontend and serialization.

Subcommands: gen, verify, solve, ladder, qes sextic, anharmonic, jack,
calogero, selftest.  Output formats: json (default), csv, latex.

Exit codes: 0 success, 1 reported verification failure (a nonzero
residual), 2 usage or parse errors, 3 mathematical errors (resonance,
degeneracy, poles, non-terminating series).

EULEROP_MAX_DEPTH overrides the nested-commutator depth bound (64).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import families, manybody, spectra
from .coeff import Field, rational_string
from .errors import (
    DegenerateDenominator,
    DegreeZeroPerturbation,
    DivisionRemainder,
    EuleropError,
    EvaluationPole,
    NoConvergence,
    NonTerminatingBCH,
    NoPolynomialSolution,
    NotAnIndicialRoot,
    OperatorSyntaxError,
    ResonanceError,
    TooManyParts,
    TruncationRequired,
    UnknownFamily,
    UnknownParameter,
    ZeroDenominator,
)
from .eulersolve import EulerEquation, euler_split, series_solve
from .opalg import LaurentPoly
from .parser import parse_operator

_USAGE_ERRORS = (OperatorSyntaxError, UnknownParameter, UnknownFamily, ValueError)
_MATH_ERRORS = (
    ResonanceError,
    NotAnIndicialRoot,
    DegreeZeroPerturbation,
    NoConvergence,
    NonTerminatingBCH,
    TruncationRequired,
    EvaluationPole,
    ZeroDenominator,
    NoPolynomialSolution,
    DivisionRemainder,
    DegenerateDenominator,
    TooManyParts,
)

_GREEK_TEX = {"alpha": r"\alpha", "beta": r"\beta", "gamma": r"\gamma",
              "lambda": r"\lambda", "mu": r"\mu", "nu": r"\nu"}


# -- serialization -------------------------------------------------------------


def poly_to_obj(p: LaurentPoly) -> dict:
    """Polynomial JSON schema: descending exponents, canonical coeff strings."""
    return {
        "variable": p.var,
        "terms": [
            {"exp": k, "coeff": str(p.terms[k])}
            for k in sorted(p.terms, reverse=True)
        ],
    }


def poly_to_csv(p: LaurentPoly) -> str:
    lines = ["exp,coeff"]
    for k in sorted(p.terms, reverse=True):
        lines.append(f"{k},{p.terms[k]}")
    return "\n".join(lines) + "\n"


def poly_to_latex(p: LaurentPoly) -> str:
    if p.is_zero():
        return "0"
    chunks = []
    for k in sorted(p.terms, reverse=True):
        c = p.terms[k]
        body = c.latex()
        if k != 0:
            xs = p.var if k == 1 else f"{p.var}^{{{k}}}"
            if body == "1":
                body = xs
            elif body == "-1":
                body = f"-{xs}"
            else:
                body = f"{body} {xs}"
        if chunks and not body.startswith("-"):
            chunks.append("+")
        chunks.append(body)
    return " ".join(chunks)


def mbasis_to_obj(poly: manybody.SymPoly) -> dict:
    """m-basis JSON: {"basis":"m","N":2,"terms":[{"partition":[...],"coeff":...}]}"""
    md = poly.to_m()
    n = poly.n
    entries = sorted(
        md.items(),
        key=lambda kv: (-kv[0].weight, tuple(-p for p in kv[0].padded(n))),
    )
    return {
        "basis": "m",
        "N": n,
        "terms": [
            {"partition": list(lam.padded(n)), "coeff": str(c)}
            for lam, c in entries
            if not c.is_zero()
        ],
    }


def mbasis_to_csv(poly: manybody.SymPoly) -> str:
    obj = mbasis_to_obj(poly)
    lines = ["partition,coeff"]
    for entry in obj["terms"]:
        part = " ".join(str(p) for p in entry["partition"])
        lines.append(f"{part},{entry['coeff']}")
    return "\n".join(lines) + "\n"


def mbasis_to_latex(poly: manybody.SymPoly) -> str:
    obj = mbasis_to_obj(poly)
    chunks = []
    for entry in obj["terms"]:
        sub = ",".join(str(p) for p in entry["partition"])
        md = poly.to_m()
        lam = manybody.Partition(entry["partition"])
        body = md[lam].latex()
        piece = f"{body}\\, m_{{{sub}}}" if body not in ("1",) else f"m_{{{sub}}}"
        if chunks and not piece.startswith("-"):
            chunks.append("+")
        chunks.append(piece)
    return " ".join(chunks)


def emit(doc, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(doc) + "\n")
    else:
        out.write(doc if isinstance(doc, str) else str(doc))


def _poly_doc(p: LaurentPoly, fmt: str):
    if fmt == "json":
        return poly_to_obj(p)
    if fmt == "csv":
        return poly_to_csv(p)
    return poly_to_latex(p) + "\n"


# -- argument plumbing ------------------------------------------------------------


def _parse_bindings(pairs):
    bindings = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ValueError(f"--bind expects name=value, got {pair!r}")
        name, _, value = pair.partition("=")
        try:
            bindings[name.strip()] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"--bind value for {name!r} must be rational, got {value!r}")
    return bindings


def _parse_partition(text):
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ValueError(f"--partition expects comma-separated integers, got {text!r}")


def _add_common(p):
    p.add_argument("--params", default="", help="comma-separated symbolic parameter names")
    p.add_argument("--bind", action="append", metavar="NAME=VALUE",
                   help="bind a parameter to an exact rational (repeatable)")
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv", "latex"), default="json")
    p.add_argument("--out", default=None, help="write output to a file instead of stdout")


def build_argparser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eulerop",
                                 description="exact Euler-operator series inversion toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a family member")
    g.add_argument("--family", required=True, choices=families.FAMILY_NAMES)
    g.add_argument("--n", type=int, required=True)
    _add_common(g)

    v = sub.add_parser("verify", help="generate and check the defining ODE residual")
    v.add_argument("--family", required=True, choices=families.FAMILY_NAMES)
    v.add_argument("--n", type=int, required=True)
    _add_common(v)

    s = sub.add_parser("solve", help="raw series inversion of F(D) + P")
    s.add_argument("--f", required=True, help="operator expression for F(D)")
    s.add_argument("--p", required=True, help="operator expression for P")
    s.add_argument("--lambda", dest="lam", type=int, required=True)
    _add_common(s)

    w = sub.add_parser("ladder", help="build and verify a ladder identity")
    w.add_argument("--kind", required=True, choices=families.LADDER_KINDS)
    w.add_argument("--n-max", type=int, default=8)
    _add_common(w)

    q = sub.add_parser("qes", help="quasi-exactly solvable spectra")
    qsub = q.add_subparsers(dest="qes_command", required=True)
    qs = qsub.add_parser("sextic", help="sextic oscillator at the special coupling")
    qs.add_argument("--n", type=int, required=True)
    qs.add_argument("--gamma", default=None, help="rational square, e.g. 1 or 9/4")
    qs.add_argument("--g", default=None, help="sqrt(gamma) directly, e.g. 3/2")
    _add_common(qs)

    an = sub.add_parser("anharmonic", help="quartic anharmonic ground-state estimate")
    an.add_argument("--alpha", required=True)
    an.add_argument("--beta", required=True)
    an.add_argument("--no-oracle", action="store_true",
                    help="skip the finite-difference comparison value")
    _add_common(an)

    j = sub.add_parser("jack", help="Jack polynomial in the m-basis")
    j.add_argument("--partition", required=True)
    j.add_argument("--N", type=int, required=True)
    _add_common(j)

    c = sub.add_parser("calogero", help="confined many-body polynomial eigenfunction")
    c.add_argument("--partition", required=True)
    c.add_argument("--N", type=int, required=True)
    _add_common(c)

    st = sub.add_parser("selftest", help="run the invariant suite")
    st.add_argument("--quick", action="store_true", help="smaller randomized budgets")
    _add_common(st)
    return ap


# -- subcommand handlers ------------------------------------------------------------


def _cmd_gen(args, out) -> int:
    bindings = _parse_bindings(args.bind)
    if args.family == "bessel" and "nu" in bindings:
        bindings["nu"] = int(bindings["nu"])
    member = families.generate(args.family, args.n, bindings, cutoff=args.cutoff)
    emit(_poly_doc(member, args.format), args.format, out)
    return 0


def _cmd_verify(args, out) -> int:
    bindings = _parse_bindings(args.bind)
    if args.family == "bessel" and "nu" in bindings:
        bindings["nu"] = int(bindings["nu"])
    report = families.verify_de(args.family, args.n, bindings, cutoff=args.cutoff)
    doc = {
        "family": args.family,
        "n": args.n,
        "residual_zero": report.residual.is_zero(),
        "ok": report.ok,
    }
    if report.allowed_above is not None:
        doc["allowed_above_degree"] = report.allowed_above
    emit(doc, "json", out)
    return 0 if report.ok else 1


def _cmd_solve(args, out) -> int:
    names = [n.strip() for n in args.params.split(",") if n.strip()]
    field = Field(names)
    f_op = parse_operator(args.f, field)
    f_poly, f_rest = euler_split(f_op)
    if not f_rest.is_zero():
        raise ValueError(f"--f must be an Euler-degree-zero operator, found {f_rest}")
    p_op = parse_operator(args.p, field)
    bindings = _parse_bindings(args.bind)
    if bindings:
        p_op = p_op.evaluate_params(bindings)
        from .eulersolve import DPoly

        f_poly = DPoly(field, [c.evaluate(bindings) for c in f_poly.coeffs])
    cutoff = args.cutoff if args.cutoff is not None else max(args.lam + 10, 10)
    sol = series_solve(EulerEquation(f_poly, p_op), args.lam, cutoff)
    if args.format == "json":
        doc = poly_to_obj(sol.body)
        doc["lambda"] = sol.lam
        doc["cutoff"] = sol.cutoff
        doc["terminated"] = sol.terminated
        emit(doc, "json", out)
    else:
        emit(_poly_doc(sol.body, args.format), args.format, out)
    return 0


def _cmd_ladder(args, out) -> int:
    ident = families.build_ladder(args.kind)
    report = families.verify_ladder(ident, args.n_max)
    doc = {
        "kind": ident.kind,
        "operator": str(ident.operator),
        "n_shift": ident.n_shift,
        "factor": str(ident.factor),
        "factor_is_squared": ident.factor_is_squared,
        "param_shift": ident.param_shift,
        "verified_to_n": args.n_max,
        "ok": report.ok,
    }
    if args.format == "latex":
        emit(f"{str(ident.operator)}\n", "latex", out)
        return 0 if report.ok else 1
    emit(doc, "json", out)
    return 0 if report.ok else 1


def _cmd_qes_sextic(args, out) -> int:
    gamma = Fraction(args.gamma) if args.gamma is not None else None
    g = Fraction(args.g) if args.g is not None else None
    result = spectra.qes_sextic(args.n, gamma=gamma, g=g, cutoff=args.cutoff)
    doc = {
        "n": result.n,
        "gamma": rational_string(result.gamma),
        "alpha": rational_string(result.alpha),
        "b": rational_string(result.b),
        "energy_polynomial": [rational_string(c) for c in result.energy_polynomial],
        "energies": [
            {"exact": rational_string(e), "decimal": float(e)} for e in result.energies
        ],
        "isolated": [
            {
                "interval": [rational_string(lo), rational_string(hi)],
                "decimal": float((lo + hi) / 2),
            }
            for lo, hi in result.isolated
        ],
        "eigenfunctions": [
            {"energy": rational_string(e), "polynomial": poly_to_obj(psi)}
            for e, psi, _ in result.eigenfunctions
        ],
        "single_coefficient_suffices": result.single_coefficient_suffices,
        "residuals_zero": result.residuals_ok,
    }
    emit(doc, "json", out)
    return 0 if result.residuals_ok else 1


def _cmd_anharmonic(args, out) -> int:
    result = spectra.anharmonic_ground(
        Fraction(args.alpha),
        Fraction(args.beta),
        cutoff=args.cutoff if args.cutoff is not None else 8,
        oracle=not args.no_oracle,
    )
    doc = {
        "alpha": rational_string(result.alpha),
        "beta": rational_string(result.beta),
        "cubic": [rational_string(c) for c in result.cubic],
        "e0": result.e0,
        "e0_exact": rational_string(result.e0_exact) if result.e0_exact is not None else None,
        "cubic_residual": result.cubic_residual,
        "closed_form_used": result.closed_form_used,
        "mu": result.mu,
        "nu": result.nu,
        "wavefunction": [{"exp": k, "value": v} for k, v in result.wavefunction],
    }
    if result.oracle_e0 is not None:
        doc["oracle_e0"] = result.oracle_e0
        doc["relative_deviation"] = abs(result.e0 - result.oracle_e0) / abs(result.oracle_e0)
    emit(doc, "json", out)
    return 0


def _many_beta(bindings):
    if "beta" in bindings:
        field = Field([])
        return field.ratfun(bindings["beta"])
    return Field(["beta"]).param("beta")


def _cmd_jack(args, out) -> int:
    bindings = _parse_bindings(args.bind)
    beta = _many_beta(bindings)
    poly = manybody.jack(_parse_partition(args.partition), beta, args.N)
    if args.format == "json":
        emit(mbasis_to_obj(poly), "json", out)
    elif args.format == "csv":
        emit(mbasis_to_csv(poly), "csv", out)
    else:
        emit(mbasis_to_latex(poly) + "\n", "latex", out)
    return 0


def _cmd_calogero(args, out) -> int:
    bindings = _parse_bindings(args.bind)
    beta = _many_beta(bindings)
    poly = manybody.calogero_polynomial(_parse_partition(args.partition), beta, args.N)
    if args.format == "json":
        emit(mbasis_to_obj(poly), "json", out)
    elif args.format == "csv":
        emit(mbasis_to_csv(poly), "csv", out)
    else:
        emit(mbasis_to_latex(poly) + "\n", "latex", out)
    return 0


def _cmd_selftest(args, out) -> int:
    from .selftest import run_all

    ok = run_all(quick=args.quick, stream=out)
    return 0 if ok else 1


def dispatch(argv) -> int:
    """Run one subcommand; returns the exit code instead of exiting."""
    ap = build_argparser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = sys.stdout
    close = False
    try:
        if args.out:
            out = open(args.out, "w")
            close = True
        if args.command == "gen":
            return _cmd_gen(args, out)
        if args.command == "verify":
            return _cmd_verify(args, out)
        if args.command == "solve":
            return _cmd_solve(args, out)
        if args.command == "ladder":
            return _cmd_ladder(args, out)
        if args.command == "qes":
            return _cmd_qes_sextic(args, out)
        if args.command == "anharmonic":
            return _cmd_anharmonic(args, out)
        if args.command == "jack":
            return _cmd_jack(args, out)
        if args.command == "calogero":
            return _cmd_calogero(args, out)
        if args.command == "selftest":
            return _cmd_selftest(args, out)
        raise AssertionError(f"unhandled command {args.command}")
    except _MATH_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _USAGE_ERRORS as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except EuleropError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    finally:
        if close:
            out.close()


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
