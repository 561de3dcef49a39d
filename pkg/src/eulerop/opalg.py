"""Laurent differential-operator algebra on a single variable.

Operators are finite normal-ordered sums of c * x^a * d^b with integer a
(negative allowed), nonnegative integer b, and RatFun coefficients.
Normal order keeps x-powers to the left of derivatives; reordering uses
d x = x d + 1 repeatedly, which for whole power blocks reads

    d^p x^q = sum_k  C(p, k) * q(q-1)...(q-k+1) * x^(q-k) d^(p-k).

The Euler operator D = x d grades the algebra: [D, x^a d^b] = (a-b) x^a d^b,
and D x^k = k x^k on monomials.  Everything here is exact and immutable,
so concurrent use needs no coordination.
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import comb, factorial

from .coeff import Field, RatFun
from .errors import NonTerminatingBCH, TruncationRequired

_VALUE = (int, Fraction, RatFun)


def _falling(a: int, k: int) -> int:
    """a (a-1) ... (a-k+1) for any integer a."""
    out = 1
    for j in range(k):
        out *= a - j
    return out


class LaurentPoly:
    """Finite sum of c * x^k with integer exponents of either sign."""

    __slots__ = ("field", "var", "terms")

    def __init__(self, field: Field, terms=None, var: str = "x"):
        self.field = field
        self.var = var
        clean: dict[int, RatFun] = {}
        for k, c in (terms or {}).items():
            c = field.ratfun(c)
            if not c.is_zero():
                clean[int(k)] = c
        self.terms = clean

    # -- constructors --------------------------------------------------------

    @classmethod
    def monomial(cls, field: Field, k: int, coeff=1, var: str = "x"):
        return cls(field, {k: coeff}, var)

    @classmethod
    def zero(cls, field: Field, var: str = "x"):
        return cls(field, {}, var)

    @classmethod
    def one(cls, field: Field, var: str = "x"):
        return cls(field, {0: 1}, var)

    # -- queries --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, k: int) -> RatFun:
        return self.terms.get(k, self.field.zero)

    def degree(self):
        """Largest exponent, or None for the zero polynomial."""
        return max(self.terms) if self.terms else None

    def valuation(self):
        """Smallest exponent, or None for the zero polynomial."""
        return min(self.terms) if self.terms else None

    def exponents(self):
        return sorted(self.terms)

    # -- arithmetic -------------------------------------------------------------

    def _binop(self, other, sign):
        if isinstance(other, _VALUE):
            other = LaurentPoly(self.field, {0: other}, self.var)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, self.field.zero) + (c if sign > 0 else -c)
        return LaurentPoly(self.field, out, self.var)

    def __add__(self, other):
        return self._binop(other, +1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, -1)

    def __rsub__(self, other):
        return (-self)._binop(other, +1)

    def __neg__(self):
        return LaurentPoly(self.field, {k: -c for k, c in self.terms.items()}, self.var)

    def __mul__(self, other):
        if isinstance(other, _VALUE):
            return LaurentPoly(
                self.field, {k: c * other for k, c in self.terms.items()}, self.var
            )
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out: dict[int, RatFun] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = k1 + k2
                prod = c1 * c2
                out[k] = out.get(k, self.field.zero) + prod
        return LaurentPoly(self.field, out, self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = LaurentPoly.one(self.field, self.var)
        for _ in range(n):
            out = out * self
        return out

    # -- transformations ---------------------------------------------------------

    def truncate(self, lo=None, hi=None) -> "LaurentPoly":
        """Keep exponents k with lo <= k <= hi (either bound optional)."""
        kept = {
            k: c
            for k, c in self.terms.items()
            if (lo is None or k >= lo) and (hi is None or k <= hi)
        }
        return LaurentPoly(self.field, kept, self.var)

    def evaluate_params(self, bindings) -> "LaurentPoly":
        return LaurentPoly(
            self.field,
            {k: c.evaluate(bindings) for k, c in self.terms.items()},
            self.var,
        )

    def map_coeffs(self, fn) -> "LaurentPoly":
        return LaurentPoly(self.field, {k: fn(c) for k, c in self.terms.items()}, self.var)

    # -- identity ----------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, _VALUE):
            other = LaurentPoly(self.field, {0: other}, self.var)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.var == other.var and self.terms == other.terms

    def __hash__(self):
        return hash((self.var, frozenset(self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for k in sorted(self.terms, reverse=True):
            pieces.append((self.terms[k], _monomial_str(self.var, k)))
        return _join_terms(pieces)

    def __repr__(self):
        return f"LaurentPoly({self})"


def _monomial_str(var: str, k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return var
    return f"{var}^{k}"


def _coeff_str(c: RatFun):
    """(sign, body) of a coefficient; body omits the sign for clean joining."""
    s = str(c)
    if s.startswith("-"):
        sign = "-"
        body = s[1:]
    else:
        sign = "+"
        body = s
    simple = c.is_constant() or (
        len(c.numer_terms()) == 1 and c.denom_terms() == [((), Fraction(1))]
    )
    if not simple or (sign == "-" and (" + " in body or " - " in body)):
        # composite coefficient: keep the sign inside parentheses
        return "+", f"({s})"
    return sign, body


def _join_terms(pieces) -> str:
    rendered = []
    for coeff, mono in pieces:
        sign, body = _coeff_str(coeff)
        if mono:
            if body == "1":
                body = mono
            else:
                body = f"{body}*{mono}"
        rendered.append((sign, body))
    first_sign, first_body = rendered[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in rendered[1:]:
        out += f" {sign} {body}"
    return out


class DiffOp:
    """Normal-ordered operator: map (a, b) -> coefficient of x^a d^b."""

    __slots__ = ("field", "var", "terms")

    def __init__(self, field: Field, terms=None, var: str = "x"):
        self.field = field
        self.var = var
        clean: dict[tuple[int, int], RatFun] = {}
        for (a, b), c in (terms or {}).items():
            if b < 0:
                raise ValueError("derivative order must be nonnegative")
            c = field.ratfun(c)
            if not c.is_zero():
                clean[(int(a), int(b))] = c
        self.terms = clean

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, field: Field, var: str = "x"):
        return cls(field, {}, var)

    @classmethod
    def scalar(cls, field: Field, c, var: str = "x"):
        return cls(field, {(0, 0): c}, var)

    @classmethod
    def x_power(cls, field: Field, a: int = 1, var: str = "x"):
        return cls(field, {(a, 0): 1}, var)

    @classmethod
    def deriv(cls, field: Field, b: int = 1, var: str = "x"):
        return cls(field, {(0, b): 1}, var)

    @classmethod
    def euler(cls, field: Field, var: str = "x"):
        """D = x d, satisfying D x^k = k x^k."""
        return cls(field, {(1, 1): 1}, var)

    @classmethod
    def from_poly(cls, p: LaurentPoly):
        """Multiplication operator by a Laurent polynomial."""
        return cls(p.field, {(k, 0): c for k, c in p.terms.items()}, p.var)

    # -- queries --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, a: int, b: int) -> RatFun:
        return self.terms.get((a, b), self.field.zero)

    def degrees(self):
        """Sorted Euler degrees a - b present in the operator."""
        return sorted({a - b for a, b in self.terms})

    def max_degree(self):
        degs = self.degrees()
        return degs[-1] if degs else None

    def min_degree(self):
        degs = self.degrees()
        return degs[0] if degs else None

    def graded_parts(self) -> dict[int, "DiffOp"]:
        """Decomposition into Euler-homogeneous components."""
        parts: dict[int, dict] = {}
        for (a, b), c in self.terms.items():
            parts.setdefault(a - b, {})[(a, b)] = c
        return {
            d: DiffOp(self.field, t, self.var) for d, t in sorted(parts.items())
        }

    def max_deriv_order(self):
        return max((b for _, b in self.terms), default=0)

    # -- arithmetic -------------------------------------------------------------

    def _binop(self, other, sign):
        if isinstance(other, _VALUE):
            other = DiffOp.scalar(self.field, other, self.var)
        if not isinstance(other, DiffOp):
            return NotImplemented
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, self.field.zero) + (c if sign > 0 else -c)
        return DiffOp(self.field, out, self.var)

    def __add__(self, other):
        return self._binop(other, +1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, -1)

    def __rsub__(self, other):
        return (-self)._binop(other, +1)

    def __neg__(self):
        return DiffOp(self.field, {k: -c for k, c in self.terms.items()}, self.var)

    def __mul__(self, other):
        """Operator composition (or scalar multiple)."""
        if isinstance(other, _VALUE):
            return DiffOp(
                self.field, {k: c * other for k, c in self.terms.items()}, self.var
            )
        if not isinstance(other, DiffOp):
            return NotImplemented
        out: dict[tuple[int, int], RatFun] = {}
        zero = self.field.zero
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                c12 = c1 * c2
                # d^b1 x^a2 = sum_k C(b1,k) falling(a2,k) x^(a2-k) d^(b1-k)
                for k in range(b1 + 1):
                    f = _falling(a2, k)
                    if f == 0:
                        continue
                    key = (a1 + a2 - k, b1 + b2 - k)
                    out[key] = out.get(key, zero) + c12 * (comb(b1, k) * f)
        return DiffOp(self.field, out, self.var)

    def __rmul__(self, other):
        if isinstance(other, _VALUE):
            return self.__mul__(other)
        return NotImplemented

    def __pow__(self, n: int):
        out = DiffOp.scalar(self.field, 1, self.var)
        for _ in range(n):
            out = out * self
        return out

    # -- action -------------------------------------------------------------------

    def apply(self, p: LaurentPoly) -> LaurentPoly:
        """Apply the operator; d x^k = k x^(k-1) for every integer k."""
        out: dict[int, RatFun] = {}
        zero = self.field.zero
        for (a, b), c in self.terms.items():
            for k, ck in p.terms.items():
                f = _falling(k, b)
                if f == 0:
                    continue
                key = k + a - b
                out[key] = out.get(key, zero) + c * ck * f
        return LaurentPoly(self.field, out, p.var)

    def evaluate_params(self, bindings) -> "DiffOp":
        return DiffOp(
            self.field,
            {key: c.evaluate(bindings) for key, c in self.terms.items()},
            self.var,
        )

    # -- identity ----------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, _VALUE):
            other = DiffOp.scalar(self.field, other, self.var)
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.var == other.var and self.terms == other.terms

    def __hash__(self):
        return hash((self.var, frozenset(self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for a, b in sorted(self.terms, key=lambda ab: (-ab[1], -ab[0])):
            mono = "*".join(
                s for s in (_monomial_str(self.var, a), _monomial_str("d", b)) if s
            )
            pieces.append((self.terms[(a, b)], mono))
        return _join_terms(pieces)

    def __repr__(self):
        return f"DiffOp({self})"


# -- commutators and BCH conjugation ------------------------------------------


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    """a b - b a in normal-ordered form."""
    return a * b - b * a


def default_max_depth() -> int:
    """BCH depth bound; EULEROP_MAX_DEPTH overrides the default of 64."""
    raw = os.environ.get("EULEROP_MAX_DEPTH")
    if raw is None:
        return 64
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"EULEROP_MAX_DEPTH must be an integer, got {raw!r}")
    if value < 1:
        raise ValueError("EULEROP_MAX_DEPTH must be positive")
    return value


def conjugate(a: DiffOp, b: DiffOp, max_depth: int | None = None) -> DiffOp:
    """exp(-a) b exp(a) = b + [b,a] + [[b,a],a]/2! + ...

    Exact when the nested commutators vanish; raises NonTerminatingBCH
    after max_depth nonzero nestings.
    """
    if max_depth is None:
        max_depth = default_max_depth()
    total = b
    nested = b
    for m in range(1, max_depth + 1):
        nested = commutator(nested, a)
        if nested.is_zero():
            return total
        total = total + nested * Fraction(1, factorial(m))
    raise NonTerminatingBCH(
        f"nested commutators still nonzero at depth {max_depth}"
    )


def exp_apply(a: DiffOp, p: LaurentPoly, cutoff: int | None = None) -> LaurentPoly:
    """sum_m a^m p / m!

    Terminates exactly when every graded part of `a` lowers degree, `a`
    has no negative x-powers, and `p` is a polynomial; otherwise a
    cutoff is required and exponents are kept in [-cutoff, cutoff].
    """
    if p.is_zero() or a.is_zero():
        return p
    degs = a.degrees()
    raising = degs[0] > 0
    lowering = degs[-1] < 0
    guaranteed = (
        lowering
        and all(xa >= 0 for xa, _ in a.terms)
        and not p.is_zero()
        and p.valuation() >= 0
    )
    if cutoff is None and not guaranteed:
        if raising:
            raise TruncationRequired(
                "exponent operator raises degree; pass a cutoff"
            )
        if not lowering:
            raise TruncationRequired(
                "exponent operator mixes raising and lowering graded parts"
            )
        raise TruncationRequired(
            "negative x-powers prevent exact termination; pass a cutoff"
        )
    if cutoff is not None and not (raising or lowering or guaranteed):
        raise TruncationRequired(
            "exponent operator mixes raising and lowering graded parts; "
            "a truncation window would drop terms that re-enter it"
        )
    term = p
    total = p
    m = 0
    while True:
        m += 1
        term = a.apply(term) * Fraction(1, m)
        if cutoff is not None and not guaranteed:
            term = term.truncate(lo=-cutoff, hi=cutoff)
        if term.is_zero():
            return total
        total = total + term
        if m > 100000:  # unreachable; guards against representation bugs
            raise TruncationRequired("exp series failed to terminate")


# -- gauge conjugation ----------------------------------------------------------


class Gauge:
    """A formal nonpolynomial prefactor G = prod x^l * exp(c x^k).

    Only the logarithmic derivative dlog(G) = G'/G (a Laurent
    polynomial) is stored; that is all conjugation needs.
    """

    __slots__ = ("dlog",)

    def __init__(self, dlog: LaurentPoly):
        self.dlog = dlog

    @classmethod
    def power(cls, field: Field, exponent, var: str = "x") -> "Gauge":
        """G = x^l for a (possibly symbolic) exponent l."""
        return cls(LaurentPoly(field, {-1: exponent}, var))

    @classmethod
    def exponential(cls, field: Field, c, k: int, var: str = "x") -> "Gauge":
        """G = exp(c x^k)."""
        return cls(LaurentPoly(field, {k - 1: field.ratfun(c) * k}, var))

    @classmethod
    def identity(cls, field: Field, var: str = "x") -> "Gauge":
        return cls(LaurentPoly.zero(field, var))

    def __mul__(self, other: "Gauge") -> "Gauge":
        return Gauge(self.dlog + other.dlog)

    def inverse(self) -> "Gauge":
        return Gauge(-self.dlog)

    def __repr__(self):
        return f"Gauge(dlog={self.dlog})"


def gauge_conjugate(op: DiffOp, gauge: Gauge) -> DiffOp:
    """G op G^{-1}: the operator acting on G-gauged functions.

    If op satisfies (op f) = g at the polynomial level, then the
    returned operator satisfies it with f, g replaced by G f, G g.
    Derivatives map as d -> d - dlog(G); x-powers are untouched.
    """
    field = op.field
    shifted = DiffOp.deriv(field, 1, op.var) - DiffOp.from_poly(gauge.dlog)
    powers = {0: DiffOp.scalar(field, 1, op.var)}
    top = op.max_deriv_order()
    for b in range(1, top + 1):
        powers[b] = powers[b - 1] * shifted
    out = DiffOp.zero(field, op.var)
    for (a, b), c in op.terms.items():
        out = out + DiffOp(field, {(a, 0): c}, op.var) * powers[b]
    return out
