"""Quantum-spectrum applications of the series engine.

Three workflows:

* harmonic quantization: the ground series of the oscillator carries a
  symbolic energy; demanding the Gaussian closed form pins it to 1/2.
* the sextic oscillator with coupling constraint -alpha/sqrt(gamma) =
  2n+3 is quasi-exactly solvable: the x^(n+2) series coefficient is a
  polynomial in E whose roots terminate the series, giving an exact
  slice of the spectrum with exactly verifiable eigenfunctions.
* the quartic anharmonic oscillator: matching the symbolic ground
  series against exp(-mu x^2 - nu x^4) is done symbolically and yields
  a cubic in the energy; its real root approximates the ground energy
  and is compared against a finite-difference oracle.

Everything except the numeric root and the grid oracle is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .coeff import Field, RatFun, fraction_sqrt
from .errors import MatchingInconsistent, NoPolynomialSolution
from .eulersolve import DPoly, EulerEquation, SeriesSolution, series_solve
from .opalg import DiffOp, LaurentPoly

# -- exact univariate root machinery (Fractions throughout) -------------------


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _eval(c, v: Fraction) -> Fraction:
    acc = Fraction(0)
    for a in reversed(c):
        acc = acc * v + a
    return acc


def _deriv(c):
    return [a * k for k, a in enumerate(c)][1:]


def _divmod(a, b):
    a = _trim(a)
    b = _trim(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and _trim(r):
        k = len(r) - len(b)
        f = r[-1] / b[-1]
        q[k] = f
        for i, bi in enumerate(b):
            r[i + k] -= f * bi
        r = _trim(r)
        if not r:
            break
    return _trim(q), _trim(r)


def poly_gcd(a, b):
    """Monic gcd of two rational-coefficient polynomials."""
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _divmod(a, b)[1]
    if a:
        lead = a[-1]
        a = [x / lead for x in a]
    return a


def _sturm_chain(c):
    chain = [_trim(c), _trim(_deriv(c))]
    while chain[-1]:
        rem = _divmod(chain[-2], chain[-1])[1]
        if not rem:
            break
        chain.append([-x for x in rem])
    return [p for p in chain if p]


def _sign_changes(chain, v):
    signs = []
    for p in chain:
        s = _eval(p, v)
        if s:
            signs.append(1 if s > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _root_count(chain, lo, hi):
    return _sign_changes(chain, lo) - _sign_changes(chain, hi)


def rational_roots(c):
    """All rational roots (each once), by the exact rational-root test."""
    c = _trim(c)
    roots = []
    if not c or len(c) == 1:
        return roots
    while c and c[0] == 0:
        if 0 not in roots:
            roots.append(Fraction(0))
        c = c[1:]
    if len(c) <= 1:
        return sorted(roots)
    denlcm = 1
    for a in c:
        denlcm = denlcm * a.denominator // __import__("math").gcd(denlcm, a.denominator)
    ic = [int(a * denlcm) for a in c]
    from math import gcd as _g

    content = reduce(_g, (abs(v) for v in ic))
    ic = [v // content for v in ic]

    def divisors(m):
        m = abs(m)
        out = set()
        i = 1
        while i * i <= m:
            if m % i == 0:
                out.add(i)
                out.add(m // i)
            i += 1
        return out

    for p in divisors(ic[0]):
        for q in divisors(ic[-1]):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if cand not in roots and _eval(c, cand) == 0:
                    roots.append(cand)
    return sorted(roots)


def isolate_real_roots(c, width=Fraction(1, 10 ** 12)):
    """(rational roots, isolating intervals for the irrational real roots).

    Rational roots are extracted exactly and deflated; the remaining
    square-free part is isolated by Sturm counts and each interval is
    bisected down to the requested rational width.
    """
    c = _trim(c)
    if len(c) <= 1:
        return [], []
    rationals = rational_roots(c)
    for r in rationals:
        while _eval(c, r) == 0 and len(c) > 1:
            c, rem = _divmod(c, [-r, Fraction(1)])
            assert not rem
    c = _trim(c)
    if len(c) <= 1:
        return rationals, []
    g = poly_gcd(c, _deriv(c))
    if len(g) > 1:
        c = _divmod(c, g)[0]
    chain = _sturm_chain(c)
    lead = abs(c[-1])
    bound = 1 + max(abs(a) for a in c) / lead
    pending = [(-bound, bound)]
    isolated = []
    while pending:
        lo, hi = pending.pop()
        k = _root_count(chain, lo, hi)
        if k == 0:
            continue
        if k == 1:
            isolated.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if _eval(c, mid) == 0:  # cannot happen: rational roots deflated
            raise AssertionError("rational root escaped deflation")
        pending.append((lo, mid))
        pending.append((mid, hi))
    intervals = []
    for lo, hi in isolated:
        while hi - lo > width:
            mid = (lo + hi) / 2
            if _eval(c, mid) == 0:
                raise AssertionError("rational root escaped deflation")
            if _root_count(chain, lo, mid) == 1:
                hi = mid
            else:
                lo = mid
        intervals.append((lo, hi))
    intervals.sort()
    return rationals, intervals


# -- harmonic quantization ---------------------------------------------------


@dataclass(frozen=True)
class HarmonicReport:
    cutoff: int
    series: SeriesSolution
    matches_gaussian: bool
    wrong_energy_detected: bool
    first_mismatch_degree: int | None


def _harmonic_equation(field: Field) -> EulerEquation:
    E = field.param("E")
    D = DPoly.gen(field)
    x2 = DiffOp.x_power(field, 2)
    x4 = DiffOp.x_power(field, 4)
    return EulerEquation(D * (D - 1), x2 * (2 * E) - x4)


def harmonic_quantization_check(cutoff: int) -> HarmonicReport:
    """Ground series with symbolic energy; the Gaussian pins E = 1/2.

    Confirms that at E = 1/2 every retained coefficient matches the
    exp(-x^2/2) Taylor series, and that the deliberately wrong value
    E = 3/2 already deviates at x^4.
    """
    if cutoff < 4 or cutoff % 2:
        raise ValueError("cutoff must be even and at least 4")
    field = Field(["E"])
    eq = _harmonic_equation(field)
    sol = series_solve(eq, 0, cutoff)
    matches = True
    for k in range(0, cutoff + 1, 2):
        target = Fraction((-1) ** (k // 2), 2 ** (k // 2) * __import__("math").factorial(k // 2))
        if sol.coefficient(k).evaluate({"E": Fraction(1, 2)}) != target:
            matches = False
            break
    wrong = sol.coefficient(4).evaluate({"E": Fraction(3, 2)})
    gauss4 = Fraction(1, 8)
    mismatch_deg = 4 if wrong != gauss4 else None
    return HarmonicReport(cutoff, sol, matches, wrong != gauss4, mismatch_deg)


# -- quasi-exactly solvable sextic oscillator ---------------------------------


@dataclass(frozen=True)
class QESResult:
    """Exact slice of the sextic oscillator spectrum at the special coupling.

    The gauge factor is exp(-b x^4) with 16 b^2 = gamma; alpha is fixed
    by -alpha/sqrt(gamma) = 2n+3.  energy_polynomial holds ascending
    rational coefficients of the common vanishing condition in E.
    """

    n: int
    gamma: Fraction
    g: Fraction
    alpha: Fraction
    b: Fraction
    energy_polynomial: tuple[Fraction, ...]
    energies: tuple[Fraction, ...]
    isolated: tuple[tuple[Fraction, Fraction], ...]
    eigenfunctions: tuple[tuple[Fraction, LaurentPoly, Fraction], ...]
    series: SeriesSolution
    single_coefficient_suffices: bool
    residuals_ok: bool


def _qes_equation(field: Field, n: int, g: Fraction) -> EulerEquation:
    E = field.param("E")
    D = DPoly.gen(field)
    x2 = DiffOp.x_power(field, 2)
    x4 = DiffOp.x_power(field, 4)
    x5d = DiffOp.x_power(field, 5) * DiffOp.deriv(field, 1)
    p = x2 * E + x4 * (2 * n * g) - x5d * (2 * g)
    return EulerEquation(D * (D - 1), p)


def qes_gauged_operator(field: Field, g: Fraction, alpha: Fraction, energy) -> DiffOp:
    """-d^2 + 2 g x^3 d + (alpha + 3g) x^2 - E, the gauged Hamiltonian."""
    d = DiffOp.deriv(field, 1)
    x2 = DiffOp.x_power(field, 2)
    x3d = DiffOp.x_power(field, 3) * d
    return -(d * d) + x3d * (2 * g) + x2 * (alpha + 3 * g) - DiffOp.scalar(field, energy)


def qes_sextic(n: int, gamma=None, g=None, cutoff: int | None = None) -> QESResult:
    """Solve the quasi-exactly-solvable slice at highest degree n.

    Exactly one of gamma (a perfect rational square) or g = sqrt(gamma)
    must be given.  Collects the series coefficients of x^(n+2) ...
    x^cutoff as polynomials in E, takes their gcd as the common
    vanishing condition, and solves it exactly over Q where possible,
    isolating any remaining real roots to width 1e-12.
    """
    if n < 0 or n % 2:
        raise ValueError("n must be even and nonnegative")
    if (gamma is None) == (g is None):
        raise ValueError("provide exactly one of gamma or g")
    if g is None:
        gamma = Fraction(gamma)
        g = fraction_sqrt(gamma)
        if g is None:
            raise ValueError("gamma must be the square of a rational")
    else:
        g = Fraction(g)
        gamma = g * g
    alpha = -(2 * n + 3) * g
    if cutoff is None:
        cutoff = n + 8
    if cutoff < n + 2:
        raise ValueError("cutoff must reach degree n + 2")
    field = Field(["E"])
    eq = _qes_equation(field, n, g)
    sol = series_solve(eq, 0, cutoff)

    polys = []
    for k in range(n + 2, cutoff + 1, 2):
        coeffs = [c.as_fraction() for c in sol.coefficient(k).as_coeff_list("E")]
        polys.append(_trim(coeffs))
    common = reduce(poly_gcd, polys)
    if len(common) <= 1:
        raise NoPolynomialSolution(polys[0])
    first_monic = [a / polys[0][-1] for a in polys[0]]
    single_ok = common == first_monic

    # integer-primitive rendering of the energy polynomial
    denlcm = 1
    for a in common:
        denlcm = denlcm * a.denominator // __import__("math").gcd(denlcm, a.denominator)
    ints = [a * denlcm for a in common]

    energies, intervals = isolate_real_roots(common)
    if not energies and not intervals:
        raise NoPolynomialSolution(polys[0])

    eigfns = []
    residuals_ok = True
    b = g / 4
    for e in energies:
        body = sol.body.evaluate_params({"E": e}).truncate(hi=n)
        # all retained coefficients above n must have vanished at this root
        for k in range(n + 1, cutoff + 1):
            if not sol.coefficient(k).evaluate({"E": e}).is_zero():
                residuals_ok = False
        gauged = qes_gauged_operator(field, g, alpha, e)
        if not gauged.apply(body).is_zero():
            residuals_ok = False
        eigfns.append((e, body, b))

    return QESResult(
        n=n,
        gamma=gamma,
        g=g,
        alpha=alpha,
        b=b,
        energy_polynomial=tuple(ints),
        energies=tuple(energies),
        isolated=tuple(intervals),
        eigenfunctions=tuple(eigfns),
        series=sol,
        single_coefficient_suffices=single_ok,
        residuals_ok=residuals_ok,
    )


# -- anharmonic oscillator ------------------------------------------------------


@dataclass(frozen=True)
class MatchingDerivation:
    """Symbolic matching of the ground series against exp(-mu x^2 - nu x^4).

    mu_rule and nu_rule live in Q(E, alpha, beta); cubic_monic holds the
    ascending coefficients (in E) of the monic cubic the third matching
    relation reduces to.
    """

    mu_rule: RatFun
    nu_rule: RatFun
    cubic_monic: tuple[RatFun, ...]
    matches_target: bool


def derive_trial_matching() -> MatchingDerivation:
    """Derive the energy cubic from scratch, symbolically.

    Matches the x^2, x^4, x^6 coefficients of the symbolic ground
    series of -psi'' + (alpha x^2 + beta x^4) psi = E psi against the
    trial exponential, solving each relation linearly.  The result is
    compared against E^3 - alpha E - (3/2) beta.
    """
    field = Field(["E", "alpha", "beta", "mu", "nu"])
    E, alpha, beta, mu, nu = field.params("E", "alpha", "beta", "mu", "nu")
    D = DPoly.gen(field)
    x2 = DiffOp.x_power(field, 2)
    x4 = DiffOp.x_power(field, 4)
    x6 = DiffOp.x_power(field, 6)
    eq = EulerEquation(D * (D - 1), x2 * E - x4 * alpha - x6 * beta)
    sol = series_solve(eq, 0, 6)
    s = {k: sol.coefficient(k) for k in (2, 4, 6)}

    # trial exp(-mu x^2 - nu x^4) expanded to degree 6
    u = LaurentPoly(field, {2: -mu, 4: -nu})
    trial = LaurentPoly.one(field)
    power = LaurentPoly.one(field)
    for m in range(1, 4):
        power = (power * u).truncate(hi=6)
        trial = trial + power * Fraction(1, __import__("math").factorial(m))
    t = {k: trial.coeff(k) for k in (2, 4, 6)}

    def solve_linear(expr: RatFun, name: str, value_of_rest: RatFun) -> RatFun:
        c = expr.as_coeff_list(name)
        if len(c) != 2:
            raise MatchingInconsistent(f"relation not linear in {name}")
        # c0 + c1 * name = value_of_rest
        return (value_of_rest - c[0]) / c[1]

    mu_rule = solve_linear(t[2], "mu", s[2])
    nu_rule = solve_linear(t[4].evaluate({"mu": mu_rule}), "nu", s[4])
    residual6 = t[6].evaluate({"mu": mu_rule, "nu": nu_rule}) - s[6]
    cubic = residual6.as_coeff_list("E")
    if len(cubic) != 4:
        raise MatchingInconsistent("third relation did not reduce to a cubic in E")
    lead = cubic[3]
    cubic_monic = tuple(c / lead for c in cubic)
    target = (beta * Fraction(-3, 2), -alpha, field.zero, field.one)
    return MatchingDerivation(
        mu_rule=mu_rule,
        nu_rule=nu_rule,
        cubic_monic=cubic_monic,
        matches_target=cubic_monic == target,
    )


@dataclass(frozen=True)
class AnharmonicResult:
    alpha: Fraction
    beta: Fraction
    series: SeriesSolution
    cubic: tuple[Fraction, ...]
    e0: float
    e0_exact: Fraction | None
    cubic_residual: float
    closed_form_used: bool
    mu: float
    nu: float
    wavefunction: tuple[tuple[int, float], ...]
    oracle_e0: float | None


def fd_ground_energy(alpha, beta, lo=-10.0, hi=10.0, npoints=2001) -> float:
    """Smallest eigenvalue of -d^2/dx^2 + alpha x^2 + beta x^4 on a grid."""
    x = np.linspace(lo, hi, npoints)
    h = x[1] - x[0]
    diag = 2.0 / h ** 2 + float(alpha) * x ** 2 + float(beta) * x ** 4
    off = np.full(npoints - 1, -1.0 / h ** 2)
    return float(eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, 0))[0])


def anharmonic_ground(alpha, beta, cutoff: int = 8, oracle: bool = True,
                      grid=(-10.0, 10.0, 2001)) -> AnharmonicResult:
    """Ground-state estimate for -psi'' + (alpha x^2 + beta x^4) psi = E psi.

    The cubic E^3 - alpha E = (3/2) beta is re-derived symbolically on
    every call (MatchingInconsistent guards the derivation).  The real
    root is taken from the closed form when its radicand is nonnegative
    and from exact bisection otherwise (the three-real-root regime),
    then polished to machine precision.
    """
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    if alpha <= 0 or beta < 0:
        raise ValueError("weak-coupling regime expects alpha > 0 and beta >= 0")
    if cutoff < 6:
        raise ValueError("cutoff must be at least 6")
    derivation = derive_trial_matching()
    if not derivation.matches_target:
        raise MatchingInconsistent(
            f"derived cubic {derivation.cubic_monic} != E^3 - alpha E - 3 beta / 2"
        )
    cubic = (Fraction(-3, 2) * beta, -alpha, Fraction(0), Fraction(1))

    rationals, intervals = isolate_real_roots(list(cubic))
    candidates: list[tuple[Fraction, Fraction | None]] = [(r, r) for r in rationals]
    candidates += [((lo + hi) / 2, None) for lo, hi in intervals]
    approx, exact = max(candidates, key=lambda t: t[0])

    radicand = Fraction(6561, 4) * beta * beta - 108 * alpha ** 3
    closed_form = radicand >= 0
    if closed_form:
        a_val = (40.5 * float(beta) + float(radicand) ** 0.5) ** (1.0 / 3.0)
        e0 = 2 ** (1.0 / 3.0) * float(alpha) / a_val + a_val / (3 * 2 ** (1.0 / 3.0))
    else:
        e0 = float(approx)
    # Newton polish on the cubic
    fa = float(alpha)
    fb = float(beta)
    for _ in range(60):
        fval = e0 ** 3 - fa * e0 - 1.5 * fb
        fder = 3 * e0 ** 2 - fa
        if fder == 0:
            break
        step = fval / fder
        e0 -= step
        if abs(step) < 1e-16 * max(1.0, abs(e0)):
            break
    if exact is not None:
        e0 = float(exact)
    cubic_residual = abs(e0 ** 3 - fa * e0 - 1.5 * fb)

    field = Field(["E"])
    D = DPoly.gen(field)
    E = field.param("E")
    eq = EulerEquation(
        D * (D - 1),
        DiffOp.x_power(field, 2) * E
        - DiffOp.x_power(field, 4) * alpha
        - DiffOp.x_power(field, 6) * beta,
    )
    sol = series_solve(eq, 0, cutoff)
    e0_rational = exact if exact is not None else Fraction(e0).limit_denominator(10 ** 15)
    wavefn = tuple(
        (k, float(sol.coefficient(k).evaluate({"E": e0_rational}).as_fraction()))
        for k in range(0, cutoff + 1, 2)
    )

    oracle_e0 = fd_ground_energy(alpha, beta, *grid) if oracle else None
    return AnharmonicResult(
        alpha=alpha,
        beta=beta,
        series=sol,
        cubic=cubic,
        e0=e0,
        e0_exact=exact,
        cubic_residual=cubic_residual,
        closed_form_used=closed_form,
        mu=e0 / 2.0,
        nu=(e0 ** 2 - fa) / 12.0,
        wavefunction=wavefn,
        oracle_e0=oracle_e0,
    )
