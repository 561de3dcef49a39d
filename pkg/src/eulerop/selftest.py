"""Randomized invariant suite, runnable as `eulerop selftest`.

Each check prints one PASS/FAIL line.  Budgets follow the shipped
verification targets: 1000 randomized cases per operator-algebra
invariant and a 100000-string parser fuzz (reduced with --quick).
"""

from __future__ import annotations

import json
import random
import sys
import time
from fractions import Fraction

from . import families, manybody, spectra
from .coeff import Field
from .errors import OperatorSyntaxError, UnknownParameter
from .eulersolve import DPoly, EulerEquation, series_solve
from .opalg import DiffOp, LaurentPoly, commutator, conjugate, exp_apply
from .parser import parse_operator


def _random_diffop(rng, field, max_terms=2, max_exp=4, max_b=3, allow_negative=True):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        a = rng.randint(-max_exp if allow_negative else 0, max_exp)
        b = rng.randint(0, max_b)
        c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        if c:
            terms[(a, b)] = terms.get((a, b), 0) + c
    return DiffOp(field, terms)


def _random_poly(rng, field, max_exp=5):
    terms = {}
    for _ in range(rng.randint(1, 3)):
        k = rng.randint(-max_exp, max_exp)
        c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        if c:
            terms[k] = terms.get(k, 0) + c
    return LaurentPoly(field, terms)


def check_grading(budget: int) -> bool:
    """[D, x^a d^b] = (a-b) x^a d^b on random single terms."""
    rng = random.Random(101)
    field = Field([])
    D = DiffOp.euler(field)
    for _ in range(budget):
        a = rng.randint(-6, 6)
        b = rng.randint(0, 6)
        term = DiffOp(field, {(a, b): 1})
        if commutator(D, term) != term * (a - b):
            return False
    return True


def check_ordering(budget: int) -> bool:
    """apply(ab, p) = apply(a, apply(b, p)) on random operators."""
    rng = random.Random(202)
    field = Field([])
    for _ in range(budget):
        a = _random_diffop(rng, field)
        b = _random_diffop(rng, field)
        p = _random_poly(rng, field)
        if (a * b).apply(p) != a.apply(b.apply(p)):
            return False
    return True


def check_jacobi(budget: int) -> bool:
    """[[a,b],c] + [[b,c],a] + [[c,a],b] = 0 on random triples."""
    rng = random.Random(303)
    field = Field([])
    for _ in range(budget):
        a = _random_diffop(rng, field, max_exp=3, max_b=2)
        b = _random_diffop(rng, field, max_exp=3, max_b=2)
        c = _random_diffop(rng, field, max_exp=3, max_b=2)
        total = (
            commutator(commutator(a, b), c)
            + commutator(commutator(b, c), a)
            + commutator(commutator(c, a), b)
        )
        if not total.is_zero():
            return False
    return True


def check_homomorphism(budget: int) -> bool:
    """apply(conjugate(A,B), exp(-A) p) = exp(-A) apply(B, p).

    A is drawn from derivative-only operators (their nested commutators
    with any polynomial-coefficient operator terminate).
    """
    rng = random.Random(404)
    field = Field([])
    for _ in range(budget):
        order = rng.randint(1, 3)
        coeff = Fraction(rng.randint(1, 3), rng.randint(1, 4))
        A = DiffOp.deriv(field, order) * coeff
        B = _random_diffop(rng, field, max_terms=2, max_exp=3, max_b=2,
                           allow_negative=False)
        terms = {}
        for _ in range(rng.randint(1, 2)):
            k = rng.randint(0, 5)
            terms[k] = terms.get(k, 0) + Fraction(rng.randint(-3, 3))
        p = LaurentPoly(field, terms)
        lhs = conjugate(A, B).apply(exp_apply(-A, p))
        rhs = exp_apply(-A, B.apply(p))
        if lhs != rhs:
            return False
    return True


def check_parser_fuzz(budget: int) -> bool:
    """Random token strings either parse or raise a positioned error."""
    rng = random.Random(505)
    field = Field(["alpha", "beta", "E", "n"])
    vocab = ["x", "d", "D", "0", "2", "17", "alpha", "E", "zeta",
             "+", "-", "*", "^", "(", ")", "/", "1/2"]
    for _ in range(budget):
        src = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 12)))
        try:
            parse_operator(src, field)
        except (OperatorSyntaxError, UnknownParameter):
            pass
    return True


def check_roundtrip_goldens() -> bool:
    """Emitted JSON documents re-parse and re-emit byte-identically."""
    from .cli import mbasis_to_obj, poly_to_obj

    docs = [
        poly_to_obj(families.generate("hermite", 3)),
        poly_to_obj(families.generate("laguerre", 2)),
        mbasis_to_obj(manybody.jack((2, 0), Field(["beta"]).param("beta"), 2)),
    ]
    for doc in docs:
        blob = json.dumps(doc)
        if json.dumps(json.loads(blob)) != blob:
            return False
    return True


def check_families_quick() -> bool:
    for name in families.FAMILY_NAMES:
        bindings = {"nu": 1} if name == "bessel" else {}
        for n in range(0, 8):
            if families.generate(name, n, bindings) != families.oracle(name, n, bindings):
                return False
            if not families.verify_de(name, n, bindings).ok:
                return False
    return True


def check_ladders_quick() -> bool:
    return all(families.verify_ladder(kind, 6).ok for kind in families.LADDER_KINDS)


def check_qes() -> bool:
    result = spectra.qes_sextic(4, gamma=1)
    return (
        result.alpha == -11
        and result.energies == (Fraction(-8), Fraction(0), Fraction(8))
        and result.residuals_ok
    )


def check_jack() -> bool:
    beta = Field(["beta"]).param("beta")
    j = manybody.jack((2, 0), beta, 2)
    return manybody.jack_residual((2, 0), beta, 2, j).is_zero()


def check_calogero() -> bool:
    beta = Field(["beta"]).param("beta")
    return all(
        manybody.calogero_verify(lam, beta, 2).ok
        for w in range(5)
        for lam in manybody.partitions_of(w, 2)
    )


def check_harmonic() -> bool:
    rep = spectra.harmonic_quantization_check(20)
    return rep.matches_gaussian and rep.wrong_energy_detected


def check_series_residual() -> bool:
    """Residual contract on a small random sample of raising equations."""
    rng = random.Random(606)
    field = Field([])
    D = DPoly.gen(field)
    for _ in range(25):
        f = D  # only root 0; positive degrees never hit it again
        terms = {}
        for _ in range(rng.randint(1, 2)):
            a = rng.randint(1, 3)
            b = rng.randint(0, 1)
            if a - b <= 0:
                a = b + 1
            terms[(a, b)] = Fraction(rng.randint(-3, 3))
        p = DiffOp(field, terms)
        if p.is_zero() or 0 in p.degrees():
            continue
        eq = EulerEquation(f, p)
        cutoff = 9
        sol = series_solve(eq, 0, cutoff)
        res = eq.residual(sol.body)
        d_plus = max(p.degrees())
        if any(k <= cutoff - d_plus for k in res.terms):
            return False
    return True


CHECKS = (
    ("opalg grading (1000 cases)", lambda q: check_grading(100 if q else 1000)),
    ("opalg normal ordering (1000 cases)", lambda q: check_ordering(100 if q else 1000)),
    ("opalg jacobi (1000 cases)", lambda q: check_jacobi(100 if q else 1000)),
    ("opalg conjugation homomorphism (1000 cases)",
     lambda q: check_homomorphism(100 if q else 1000)),
    ("parser fuzz (100000 strings)", lambda q: check_parser_fuzz(5000 if q else 100000)),
    ("json round-trip goldens", lambda q: check_roundtrip_goldens()),
    ("families oracle agreement", lambda q: check_families_quick()),
    ("ladder identities", lambda q: check_ladders_quick()),
    ("qes sextic n=4", lambda q: check_qes()),
    ("jack residual", lambda q: check_jack()),
    ("calogero residuals", lambda q: check_calogero()),
    ("harmonic quantization", lambda q: check_harmonic()),
    ("series residual contract", lambda q: check_series_residual()),
)


def run_all(quick: bool = False, stream=None) -> bool:
    stream = stream or sys.stdout
    all_ok = True
    for name, fn in CHECKS:
        start = time.perf_counter()
        ok = fn(quick)
        elapsed = time.perf_counter() - start
        stream.write(f"{'PASS' if ok else 'FAIL'} {name} ({elapsed:.2f}s)\n")
        all_ok = all_ok and ok
    return all_ok
