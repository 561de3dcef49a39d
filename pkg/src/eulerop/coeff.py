"""Exact coefficient field: rational functions over Q in declared parameters.

Every scalar in the engine is a :class:`RatFun`, a canonically reduced
ratio of multivariate polynomials with rational coefficients.  The
parameter set is declared once per :class:`Field` (a computation
session); using an undeclared name is an error rather than silent
creation.  Canonical form makes structural equality equal mathematical
equality, so zero-testing is decidable and every residual check in the
rest of the package is exact.

Symbolic representation is delegated to sympy's sparse rational-function
fields (``sympy.polys.fields``) over QQ, which keep numerator and
denominator integer-coefficient, primitive as a pair, and GCD-reduced.
Parameter-free values are held as plain Fractions (a RatFun with an
empty parameter set is an exact rational), which keeps the bound-
parameter workloads off the symbolic machinery entirely.  On top of
that this module pins a denominator sign convention and the canonical
string form ``(2*beta)/(beta + 1)`` used by the CLI and JSON schemas.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd

from sympy import QQ
from sympy.polys.fields import field as _sympy_field

from .errors import (
    EvaluationPole,
    FieldMismatch,
    UnknownParameter,
    ZeroDenominator,
)

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")

#: names the operator grammar reserves for the variable and derivatives
RESERVED_NAMES = frozenset({"x", "d", "D"})


def _to_fraction(value):
    """Coerce an int / Fraction / QQ element to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(int(value.numerator), int(value.denominator))


class Field:
    """A declared-parameter coefficient field Q(p1, ..., pk).

    Fields with the same parameter set are interchangeable; a value
    whose parameters form a subset of another field's embeds into it,
    while incomparable parameter sets raise FieldMismatch.
    """

    __slots__ = ("names", "_field", "_gens", "_zero", "_one", "_gcache")

    def __init__(self, params=()):
        names = sorted({str(p) for p in params})
        for name in names:
            if not _IDENT.match(name):
                raise ValueError(f"invalid parameter name {name!r}")
            if name in RESERVED_NAMES:
                raise ValueError(
                    f"parameter name {name!r} is reserved by the operator grammar"
                )
        self.names = tuple(names)
        created = _sympy_field(list(names), QQ)
        self._field = created[0]
        self._gens = dict(zip(names, created[1:]))
        self._gcache = {}
        self._zero = RatFun(self, _frac=Fraction(0))
        self._one = RatFun(self, _frac=Fraction(1))

    # -- construction ------------------------------------------------------

    def param(self, name) -> "RatFun":
        """The parameter with the given declared name."""
        try:
            return RatFun(self, self._gens[name])
        except KeyError:
            raise UnknownParameter(name) from None

    def params(self, *names):
        """Convenience: several parameters at once."""
        return tuple(self.param(n) for n in names)

    def ratfun(self, value) -> "RatFun":
        """Coerce an int, Fraction, or RatFun (of a parameter subset) here."""
        if isinstance(value, RatFun):
            if value.field.names == self.names:
                return value
            if value.is_constant():
                return RatFun(self, _frac=value.as_fraction())
            return self.embed(value)
        return RatFun(self, _frac=_to_fraction(value))

    def _ground_elem(self, frac: Fraction):
        """FracElement for a rational constant (small values cached)."""
        cache = abs(frac.numerator) <= 1 << 16 and frac.denominator <= 1 << 16
        if cache:
            hit = self._gcache.get(frac)
            if hit is not None:
                return hit
        elem = self._field.ground_new(QQ(frac.numerator, frac.denominator))
        if cache and len(self._gcache) < 4096:
            self._gcache[frac] = elem
        return elem

    @property
    def zero(self) -> "RatFun":
        return self._zero

    @property
    def one(self) -> "RatFun":
        return self._one

    def normalize(self, num, den) -> "RatFun":
        """Canonical reduced form of num/den.

        Raises ZeroDenominator when den is the zero polynomial.
        """
        num = self.ratfun(num)
        den = self.ratfun(den)
        if den.is_zero():
            raise ZeroDenominator("zero denominator")
        return num / den

    def embed(self, value: "RatFun") -> "RatFun":
        """Re-express a value from a field whose parameters are a subset."""
        if value.is_constant():
            return RatFun(self, _frac=value.as_fraction())
        if value.field.names == self.names:
            return RatFun(self, value._e)
        missing = set(value.field.names) - set(self.names)
        if missing:
            raise FieldMismatch(
                f"cannot embed {value}: parameters {sorted(missing)} are not declared"
            )
        num = value._rebuild_poly_in(value._e.numer, self)
        den = value._rebuild_poly_in(value._e.denom, self)
        return num / den

    # -- identity ----------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Field) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Field({list(self.names)})"


class RatFun:
    """A canonical rational function; an immutable value object.

    Internally either a plain Fraction (no parameters present) or a
    sympy FracElement; construction demotes ground elements, so the
    symbolic representation always carries at least one parameter.
    """

    __slots__ = ("field", "_e", "_f")

    def __init__(self, field: Field, elem=None, _frac=None):
        self.field = field
        if _frac is not None:
            self._f = _frac
            self._e = None
            return
        num = elem.numer
        den = elem.denom
        if num.is_ground and den.is_ground:
            top = _to_fraction(num.LC) if num else Fraction(0)
            self._f = top / _to_fraction(den.LC)
            self._e = None
            return
        # pin the sign convention: denominator leading coefficient positive
        if den.LC < 0:
            elem = elem.__class__(-num, -den)
        self._e = elem
        self._f = None

    @property
    def _elem(self):
        """The FracElement view (promoting constants on demand)."""
        if self._e is not None:
            return self._e
        return self.field._ground_elem(self._f)

    # -- coercion ----------------------------------------------------------

    def _pair(self, other):
        """Bring self and other into a common field, or return None."""
        if isinstance(other, (int, Fraction)):
            return self, RatFun(self.field, _frac=_to_fraction(other))
        if not isinstance(other, RatFun):
            return None
        if other.field.names == self.field.names:
            return self, other
        if other._f is not None:
            return self, RatFun(self.field, _frac=other._f)
        if self._f is not None:
            return RatFun(other.field, _frac=self._f), other
        mine = set(self.field.names)
        theirs = set(other.field.names)
        if theirs <= mine:
            return self, self.field.embed(other)
        if mine <= theirs:
            return other.field.embed(self), other
        raise FieldMismatch(
            f"fields {self.field.names} and {other.field.names} do not mix"
        )

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a._f is not None and b._f is not None:
            return RatFun(a.field, _frac=a._f + b._f)
        return RatFun(a.field, a._elem + b._elem)

    __radd__ = __add__

    def __sub__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a._f is not None and b._f is not None:
            return RatFun(a.field, _frac=a._f - b._f)
        return RatFun(a.field, a._elem - b._elem)

    def __rsub__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a._f is not None and b._f is not None:
            return RatFun(a.field, _frac=b._f - a._f)
        return RatFun(a.field, b._elem - a._elem)

    def __mul__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a._f is not None and b._f is not None:
            return RatFun(a.field, _frac=a._f * b._f)
        if a._f == 0 or b._f == 0:
            return a.field.zero
        return RatFun(a.field, a._elem * b._elem)

    __rmul__ = __mul__

    def __truediv__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if b.is_zero():
            raise ZeroDenominator("division by zero")
        if a._f is not None and b._f is not None:
            return RatFun(a.field, _frac=a._f / b._f)
        return RatFun(a.field, a._elem / b._elem)

    def __rtruediv__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a.is_zero():
            raise ZeroDenominator("division by zero")
        if a._f is not None and b._f is not None:
            return RatFun(a.field, _frac=b._f / a._f)
        return RatFun(a.field, b._elem / a._elem)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0 and self.is_zero():
            raise ZeroDenominator("zero to a negative power")
        if self._f is not None:
            return RatFun(self.field, _frac=self._f ** n)
        return RatFun(self.field, self._e ** n)

    def __neg__(self):
        if self._f is not None:
            return RatFun(self.field, _frac=-self._f)
        return RatFun(self.field, -self._e)

    def __pos__(self):
        return self

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return self._f == 0 if self._f is not None else False

    def is_one(self) -> bool:
        return self._f == 1 if self._f is not None else False

    def is_constant(self) -> bool:
        return self._f is not None

    def __bool__(self):
        return not self.is_zero()

    def as_fraction(self) -> Fraction:
        """The exact rational value; raises if parameters remain."""
        if self._f is None:
            raise ValueError(f"{self} is not a parameter-free constant")
        return self._f

    def as_int(self) -> int | None:
        """The value as an int if it is an integer constant, else None."""
        if self._f is None or self._f.denominator != 1:
            return None
        return self._f.numerator

    # -- substitution ----------------------------------------------------------

    def evaluate(self, bindings) -> "RatFun":
        """Substitute values for a subset of the parameters.

        Values may be ints, Fractions, or RatFuns of the same field;
        unbound parameters remain symbolic.  Raises EvaluationPole when
        the denominator vanishes under the bindings, UnknownParameter
        for names not declared in the field.
        """
        field = self.field
        for name in bindings:
            if name not in field._gens:
                raise UnknownParameter(name)
        if self._f is not None:
            return self
        values = {name: field.ratfun(v) for name, v in bindings.items()}
        num = self._subst_poly(self._e.numer, values)
        den = self._subst_poly(self._e.denom, values)
        if den.is_zero():
            raise EvaluationPole(f"denominator of {self} vanishes under {bindings}")
        return num / den

    def _subst_poly(self, poly, values):
        field = self.field
        names = field.names
        out = field.zero
        for monom, coeff in poly.terms():
            term = field.ratfun(_to_fraction(coeff))
            for name, exp in zip(names, monom):
                if not exp:
                    continue
                base = values.get(name)
                if base is None:
                    base = field.param(name)
                term = term * base ** exp
            out = out + term
        return out

    def _rebuild_poly_in(self, poly, target: Field) -> "RatFun":
        names = self.field.names
        out = target.zero
        for monom, coeff in poly.terms():
            term = target.ratfun(_to_fraction(coeff))
            for name, exp in zip(names, monom):
                if exp:
                    term = term * target.param(name) ** exp
            out = out + term
        return out

    def as_coeff_list(self, name) -> list["RatFun"]:
        """Coefficients of this value viewed as a polynomial in one parameter.

        Requires the parameter to be absent from the denominator.
        Returns ascending coefficients (constant term first).
        """
        field = self.field
        if name not in field._gens:
            raise UnknownParameter(name)
        if self._f is not None:
            return [self]
        idx = field.names.index(name)
        if any(m[idx] for m, _ in self._e.denom.terms()):
            raise ValueError(f"{name} appears in the denominator of {self}")
        den = RatFun(field, field._field(self._e.denom))
        buckets: dict[int, RatFun] = {}
        for monom, coeff in self._e.numer.terms():
            rest = list(monom)
            power = rest[idx]
            rest[idx] = 0
            term = field.ratfun(_to_fraction(coeff))
            for pname, exp in zip(field.names, rest):
                if exp:
                    term = term * field.param(pname) ** exp
            buckets[power] = buckets.get(power, field.zero) + term
        top = max(buckets, default=0)
        return [buckets.get(k, field.zero) / den for k in range(top + 1)]

    # -- identity ----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, RatFun):
            if self._f is not None and other._f is not None:
                return self._f == other._f
            if (self._f is None) != (other._f is None):
                return False
            if self.field.names == other.field.names:
                return self._e == other._e
            try:
                a, b = self._pair(other)
            except FieldMismatch:
                return False
            return a._e == b._e
        if isinstance(other, (int, Fraction)):
            return self._f is not None and self._f == other
        return NotImplemented

    def __hash__(self):
        if self._f is not None:
            return hash(self._f)
        names = self.field.names

        def key(terms):
            return tuple(
                (tuple((nm, e) for nm, e in zip(names, m) if e), c)
                for m, c in terms
            )

        return hash((key(self.numer_terms()), key(self.denom_terms())))

    # -- rendering ----------------------------------------------------------

    def numer_terms(self):
        """Numerator as [(exponent tuple over field.names, Fraction)], canonical order."""
        if self._f is not None:
            return [((), Fraction(self._f.numerator))]
        return _sorted_terms(self._e.numer)

    def denom_terms(self):
        if self._f is not None:
            return [((), Fraction(self._f.denominator))]
        return _sorted_terms(self._e.denom)

    def __str__(self):
        if self._f is not None:
            return _frac_string(self._f)
        num = _poly_string(self.numer_terms(), self.field.names)
        den_terms = self.denom_terms()
        if len(den_terms) == 1 and den_terms[0][0] == () and den_terms[0][1] == 1:
            return num
        den = _poly_string(den_terms, self.field.names)
        return f"({num})/({den})"

    def __repr__(self):
        return f"RatFun({self})"

    def latex(self) -> str:
        if self._f is not None:
            f = self._f
            if f.denominator == 1:
                return str(f.numerator)
            sign = "-" if f < 0 else ""
            return rf"{sign}\frac{{{abs(f.numerator)}}}{{{f.denominator}}}"
        num = _poly_string(self.numer_terms(), self.field.names, latex=True)
        den_terms = self.denom_terms()
        if len(den_terms) == 1 and den_terms[0][0] == ():
            if den_terms[0][1] == 1:
                return num
        den = _poly_string(den_terms, self.field.names, latex=True)
        return rf"\frac{{{num}}}{{{den}}}"


def _sorted_terms(poly):
    """Terms of a sympy PolyElement in graded-lex descending order.

    Coefficients come back as Fractions; the all-zero exponent tuple is
    normalized to ().
    """
    terms = []
    for monom, coeff in poly.terms():
        monom = tuple(monom)
        if all(e == 0 for e in monom):
            monom = ()
        terms.append((monom, _to_fraction(coeff)))
    terms.sort(key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))
    if not terms:
        terms = [((), Fraction(0))]
    return terms


_GREEK = {
    "alpha": r"\alpha", "beta": r"\beta", "gamma": r"\gamma",
    "lambda": r"\lambda", "mu": r"\mu", "nu": r"\nu",
}


def _frac_string(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _poly_string(terms, names, latex=False) -> str:
    pieces = []
    for monom, coeff in terms:
        if coeff == 0:
            continue
        mono_parts = []
        for name, exp in zip(names, monom):
            if not exp:
                continue
            shown = _GREEK.get(name, name) if latex else name
            if exp == 1:
                mono_parts.append(shown)
            elif latex:
                mono_parts.append(f"{shown}^{{{exp}}}")
            else:
                mono_parts.append(f"{shown}^{exp}")
        mag = abs(coeff)
        if not mono_parts:
            body = _frac_string(mag)
        elif mag == 1:
            body = (" " if latex else "*").join(mono_parts)
        else:
            sep = r" \, " if latex else "*"
            body = _frac_string(mag) + sep + sep.join(mono_parts)
        pieces.append(("-" if coeff < 0 else "+", body))
    if not pieces:
        return "0"
    first_sign, first_body = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def rational_string(f: Fraction) -> str:
    """Canonical string for a plain rational, e.g. '8', '-3/4'."""
    return _frac_string(Fraction(f))


def fraction_sqrt(f: Fraction):
    """Exact square root of a nonnegative rational, or None if irrational."""
    f = Fraction(f)
    if f < 0:
        return None
    from math import isqrt

    rn = isqrt(f.numerator)
    rd = isqrt(f.denominator)
    if rn * rn == f.numerator and rd * rd == f.denominator:
        return Fraction(rn, rd)
    return None


def lcm(a: int, b: int) -> int:
    return abs(a * b) // gcd(a, b) if a and b else 0
