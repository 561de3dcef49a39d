"""Series inversion of F(D) + P equations.

An equation is split as [F(D) + P] y = 0 where F is a polynomial in the
Euler operator D = x d/dx and P carries no Euler-degree-zero part.  Each
indicial root lambda of F seeds the solution

    y = C sum_m (-1)^m [F(D)^{-1} P]^m x^lambda,

where 1/F(D) acts on a monomial of degree k as the exact scalar 1/F(k).
Any reached degree with F(k) = 0 aborts with ResonanceError instead of
producing a logarithmic branch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy

from .coeff import Field, RatFun
from .errors import (
    DegreeZeroPerturbation,
    NoConvergence,
    NotAnIndicialRoot,
    ResonanceError,
)
from .opalg import DiffOp, LaurentPoly

_VALUE = (int, Fraction, RatFun)


class DPoly:
    """Polynomial in the symbol D with RatFun coefficients."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs=()):
        cs = [field.ratfun(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def gen(cls, field: Field) -> "DPoly":
        """The polynomial D itself."""
        return cls(field, (0, 1))

    @classmethod
    def constant(cls, field: Field, c) -> "DPoly":
        return cls(field, (c,))

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else None

    def __call__(self, value):
        """Evaluate by Horner; accepts int, Fraction, or RatFun."""
        if not isinstance(value, RatFun):
            value = self.field.ratfun(value)
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    # -- arithmetic (enough to build (D + a)(D - b) style products) -----------

    def _coerce(self, other):
        if isinstance(other, _VALUE):
            return DPoly.constant(self.field, other)
        if isinstance(other, DPoly):
            return other
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        zero = self.field.zero
        cs = [
            (self.coeffs[i] if i < len(self.coeffs) else zero)
            + (other.coeffs[i] if i < len(other.coeffs) else zero)
            for i in range(n)
        ]
        return DPoly(self.field, cs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return DPoly(self.field, [-c for c in self.coeffs])

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return DPoly(self.field, ())
        zero = self.field.zero
        cs = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                cs[i + j] = cs[i + j] + a * b
        return DPoly(self.field, cs)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for j in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[j]
            if c.is_zero():
                continue
            mono = "" if j == 0 else ("D" if j == 1 else f"D^{j}")
            parts.append((c, mono))
        from .opalg import _join_terms

        return _join_terms(parts)

    def __repr__(self):
        return f"DPoly({self})"

    def as_diffop(self, var: str = "x") -> DiffOp:
        """The operator sum c_j (x d)^j."""
        Dop = DiffOp.euler(self.field, var)
        out = DiffOp.zero(self.field, var)
        power = DiffOp.scalar(self.field, 1, var)
        for c in self.coeffs:
            out = out + power * c
            power = power * Dop
        return out


def euler_split(op: DiffOp) -> tuple[DPoly, DiffOp]:
    """Split an operator into its degree-zero part as F(D) and the rest as P.

    Degree-zero terms are x^k d^k combinations; each converts exactly via
    x^k d^k = D (D-1) ... (D-k+1).
    """
    field = op.field
    f = DPoly(field, ())
    p_terms = {}
    D = DPoly.gen(field)
    for (a, b), c in op.terms.items():
        if a == b:
            block = DPoly.constant(field, 1)
            for j in range(b):
                block = block * (D - j)
            f = f + block * c
        else:
            p_terms[(a, b)] = c
    return f, DiffOp(field, p_terms, op.var)


@dataclass(frozen=True)
class EulerEquation:
    """[F(D) + P] y = 0 with P free of Euler-degree-zero terms."""

    f: DPoly
    p: DiffOp
    var: str = "x"

    def __post_init__(self):
        if self.f.is_zero():
            raise ValueError("F(D) must not be identically zero")
        if 0 in self.p.degrees():
            part = self.p.graded_parts()[0]
            raise DegreeZeroPerturbation(
                f"perturbation has an Euler-degree-zero part: {part}"
            )

    def residual(self, body: LaurentPoly) -> LaurentPoly:
        """[F(D) + P] applied to a candidate solution."""
        field = self.f.field
        out = self.p.apply(body)
        f_part = {k: self.f(k) * c for k, c in body.terms.items()}
        return out + LaurentPoly(field, f_part, body.var)


@dataclass(frozen=True)
class IndicialRoots:
    """Integer roots of F plus symbolic roots from linear factors."""

    integers: tuple[int, ...]
    symbolic: tuple[RatFun, ...]


def _ratfun_to_expr(c: RatFun, symbols: dict):
    num = sympy.Integer(0)
    for monom, coeff in c.numer_terms():
        term = sympy.Rational(coeff.numerator, coeff.denominator)
        for name, exp in zip(c.field.names, monom):
            if exp:
                term *= symbols[name] ** exp
        num += term
    den = sympy.Integer(0)
    for monom, coeff in c.denom_terms():
        term = sympy.Rational(coeff.numerator, coeff.denominator)
        for name, exp in zip(c.field.names, monom):
            if exp:
                term *= symbols[name] ** exp
        den += term
    return num / den


def indicial_roots(f: DPoly, bindings=None) -> IndicialRoots:
    """All integer k with F(k) = 0, plus symbolic linear-factor roots.

    Optional bindings specialize parameters first, so e.g. (D+n)(D-n)
    with n = 3 reports {-3, 3}.
    """
    field = f.field
    if bindings:
        f = DPoly(field, [c.evaluate(bindings) for c in f.coeffs])
    if f.is_zero():
        return IndicialRoots((), ())
    Dsym = sympy.Symbol("_D_")
    symbols = {name: sympy.Symbol(name) for name in field.names}
    expr = sympy.Integer(0)
    for j, c in enumerate(f.coeffs):
        expr += _ratfun_to_expr(c, symbols) * Dsym ** j
    expr = sympy.together(expr)
    num, _ = sympy.fraction(expr)
    integers = set()
    symbolic = []
    for factor, _mult in sympy.factor_list(sympy.expand(num), Dsym)[1]:
        poly = sympy.Poly(factor, Dsym)
        if poly.degree() != 1:
            continue
        c1, c0 = poly.all_coeffs()
        root_expr = sympy.cancel(-c0 / c1)
        root = _expr_to_ratfun(root_expr, field)
        value = root.as_int()
        if root.is_constant():
            if value is not None:
                integers.add(value)
        else:
            symbolic.append(root)
    # double-check integer roots against exact evaluation
    integers = {k for k in integers if f(k).is_zero()}
    return IndicialRoots(tuple(sorted(integers)), tuple(symbolic))


def _expr_to_ratfun(expr, field: Field) -> RatFun:
    elem = field._field.from_expr(expr)
    return RatFun(field, elem)


def invert_f_on(f: DPoly, p: LaurentPoly) -> LaurentPoly:
    """Apply 1/F(D) to a Laurent polynomial: x^k picks up 1/F(k).

    Raises ResonanceError(k) if some present degree k has F(k) = 0.
    """
    out = {}
    for k, c in p.terms.items():
        fk = f(k)
        if fk.is_zero():
            raise ResonanceError(k)
        out[k] = c / fk
    return LaurentPoly(f.field, out, p.var)


@dataclass(frozen=True)
class SeriesSolution:
    """Truncated or terminating solution seeded at x^lambda.

    residual_degree is the lowest degree at which a nonzero residual
    term may survive truncation (None when the series terminated, in
    which case the residual is identically zero).
    """

    lam: int
    body: LaurentPoly
    cutoff: int
    terminated: bool
    residual_degree: int | None

    def coefficient(self, k: int) -> RatFun:
        return self.body.coeff(k)


def series_solve(
    eq: EulerEquation, lam: int, cutoff: int, max_iter: int = 10000
) -> SeriesSolution:
    """Build sum_m (-1)^m [F^{-1} P]^m x^lambda up to the cutoff degree.

    The coefficient of x^lambda is exactly 1 (callers apply their own
    normalization).  For degree-raising P exponents above cutoff are
    dropped (they can never feed back down); for degree-lowering P the
    window is bounded below by -cutoff.  Natural termination (the next
    term is exactly the zero polynomial) overrides the cutoff and is
    reported via `terminated`.
    """
    field = eq.f.field
    if not eq.f(lam).is_zero():
        raise NotAnIndicialRoot(f"F({lam}) = {eq.f(lam)} != 0")
    if cutoff < lam:
        raise ValueError("cutoff must be at least lambda")
    degs = eq.p.degrees()
    raising = bool(degs) and degs[0] > 0
    lowering = bool(degs) and degs[-1] < 0
    d_plus = degs[-1] if degs else 0

    term = LaurentPoly.monomial(field, lam)
    body = term
    terminated = False
    for _ in range(max_iter):
        term = eq.p.apply(term)
        if term.is_zero():
            terminated = True
            break
        if raising:
            term = term.truncate(hi=cutoff)
        elif lowering:
            term = term.truncate(lo=-cutoff)
        else:
            raise NoConvergence(
                "perturbation mixes raising and lowering graded parts; "
                "the series has no finite truncation"
            )
        if term.is_zero():
            break
        term = -invert_f_on(eq.f, term)
        body = body + term
    else:
        raise NoConvergence(f"series did not settle within {max_iter} iterations")

    residual_degree = None if terminated else cutoff - d_plus + 1
    return SeriesSolution(
        lam=lam,
        body=body,
        cutoff=cutoff,
        terminated=terminated,
        residual_degree=residual_degree,
    )
