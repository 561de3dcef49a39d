"""Symmetric-function eigenproblems: Jack polynomials and Calogero states.

Everything works at the gauged polynomial level: the ground-state
prefactors are never represented, only the operators they induce.

* Jack: the gauged circular-model operator splits into the diagonal
  sum of squared Euler operators plus the pair part
  beta (z_i+z_j)/(z_i-z_j)(D_i-D_j); inverting the diagonal on the
  monomial symmetric basis and resumming the resulting geometric tails
  exactly (dominance-descending back-substitution) gives the Jack
  polynomial with m_lambda coefficient 1.
* Calogero: the confined model's polynomial parts are exponential
  images of monomial symmetric functions under the degree-lowering
  operator A = (1/2) sum d_i^2 + beta sum_{i != j} (x_i - x_j)^{-1} d_i;
  the same degree-shift resummation that yields exp(-d^2/4) for the
  one-variable oscillator yields exp(-A/2) here, and the eigenvalue
  above the ground state is the total degree.

Pair terms divide by (z_i - z_j); the division must be exact, and a
nonzero remainder (a symmetry violation) raises DivisionRemainder.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .coeff import Field, RatFun
from .errors import (
    DegenerateDenominator,
    DivisionRemainder,
    NoConvergence,
    TooManyParts,
)

_VALUE = (int, Fraction, RatFun)


class Partition:
    """Weakly decreasing nonnegative integer parts."""

    __slots__ = ("parts",)

    def __init__(self, parts):
        parts = tuple(int(p) for p in parts)
        if any(p < 0 for p in parts):
            raise ValueError("parts must be nonnegative")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError("parts must be weakly decreasing")
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        self.parts = parts

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def padded(self, n: int) -> tuple[int, ...]:
        if len(self.parts) > n:
            raise TooManyParts(f"{self} has more than {n} nonzero parts")
        return self.parts + (0,) * (n - len(self.parts))

    def dominates(self, other: "Partition", strict: bool = False) -> bool:
        """Dominance order; defined for equal weights."""
        if self.weight != other.weight:
            raise ValueError("dominance compares equal-weight partitions")
        a = self.parts + (0,) * max(0, len(other.parts) - len(self.parts))
        b = other.parts + (0,) * max(0, len(self.parts) - len(other.parts))
        pa = pb = 0
        for x, y in zip(a, b):
            pa += x
            pb += y
            if pa < pb:
                return False
        return self.parts != other.parts if strict else True

    def __eq__(self, other):
        return isinstance(other, Partition) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __repr__(self):
        return f"Partition{self.parts}"

    def __str__(self):
        return "(" + ",".join(map(str, self.parts)) + ")"


def partitions_of(weight: int, max_parts: int):
    """All partitions of the given weight into at most max_parts parts."""
    def rec(rest, cap, prefix):
        if rest == 0:
            yield Partition(prefix)
            return
        if len(prefix) == max_parts:
            return
        top = min(rest, cap)
        for p in range(top, 0, -1):
            yield from rec(rest - p, p, prefix + [p])

    if weight == 0:
        yield Partition(())
        return
    yield from rec(weight, weight, [])


class SymPoly:
    """Polynomial in z_1..z_N with RatFun coefficients, exponent-vector terms."""

    __slots__ = ("field", "n", "terms")

    def __init__(self, field: Field, n: int, terms=None):
        self.field = field
        self.n = n
        clean: dict[tuple[int, ...], RatFun] = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n or any(e < 0 for e in mono):
                raise ValueError(f"bad exponent vector {mono} for {n} variables")
            c = field.ratfun(c)
            if not c.is_zero():
                clean[mono] = c
        self.terms = clean

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, field: Field, n: int):
        return cls(field, n, {})

    @classmethod
    def one(cls, field: Field, n: int):
        return cls(field, n, {(0,) * n: 1})

    @classmethod
    def monomial(cls, field: Field, exponents, coeff=1):
        exponents = tuple(exponents)
        return cls(field, len(exponents), {exponents: coeff})

    # -- queries --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, exponents) -> RatFun:
        return self.terms.get(tuple(exponents), self.field.zero)

    def is_symmetric(self) -> bool:
        for mono, c in self.terms.items():
            rep = tuple(sorted(mono, reverse=True))
            if self.terms.get(rep) != c:
                return False
        return True

    # -- arithmetic -------------------------------------------------------------

    def _binop(self, other, sign):
        if isinstance(other, _VALUE):
            other = SymPoly(self.field, self.n, {(0,) * self.n: other})
        if not isinstance(other, SymPoly):
            return NotImplemented
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, self.field.zero) + (c if sign > 0 else -c)
        return SymPoly(self.field, self.n, out)

    def __add__(self, other):
        return self._binop(other, +1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, -1)

    def __rsub__(self, other):
        return (-self)._binop(other, +1)

    def __neg__(self):
        return SymPoly(self.field, self.n, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, _VALUE):
            return SymPoly(
                self.field, self.n, {m: c * other for m, c in self.terms.items()}
            )
        if not isinstance(other, SymPoly):
            return NotImplemented
        out: dict[tuple[int, ...], RatFun] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, self.field.zero) + c1 * c2
        return SymPoly(self.field, self.n, out)

    __rmul__ = __mul__

    # -- calculus -----------------------------------------------------------------

    def partial(self, i: int) -> "SymPoly":
        out = {}
        for mono, c in self.terms.items():
            e = mono[i]
            if e:
                new = mono[:i] + (e - 1,) + mono[i + 1:]
                out[new] = out.get(new, self.field.zero) + c * e
        return SymPoly(self.field, self.n, out)

    def euler(self, i: int) -> "SymPoly":
        """z_i d/dz_i, diagonal on monomials."""
        return SymPoly(
            self.field,
            self.n,
            {m: c * m[i] for m, c in self.terms.items() if m[i]},
        )

    def mul_var(self, i: int, power: int = 1) -> "SymPoly":
        return SymPoly(
            self.field,
            self.n,
            {m[:i] + (m[i] + power,) + m[i + 1:]: c for m, c in self.terms.items()},
        )

    def swap(self, i: int, j: int) -> "SymPoly":
        out = {}
        for mono, c in self.terms.items():
            lst = list(mono)
            lst[i], lst[j] = lst[j], lst[i]
            out[tuple(lst)] = c
        return SymPoly(self.field, self.n, out)

    def div_diff(self, i: int, j: int) -> "SymPoly":
        """Exact division by (z_i - z_j); DivisionRemainder if inexact."""
        quot: dict[tuple[int, ...], RatFun] = {}
        rem: dict[tuple[int, ...], RatFun] = {}
        zero = self.field.zero
        for mono, c in self.terms.items():
            a, b = mono[i], mono[j]
            # z_i^a z_j^b = (z_i - z_j) sum_{t<a} z_i^t z_j^{a+b-1-t} + z_j^{a+b}
            for t in range(a):
                new = list(mono)
                new[i] = t
                new[j] = a + b - 1 - t
                key = tuple(new)
                quot[key] = quot.get(key, zero) + c
            new = list(mono)
            new[i] = 0
            new[j] = a + b
            key = tuple(new)
            rem[key] = rem.get(key, zero) + c
        if any(not c.is_zero() for c in rem.values()):
            raise DivisionRemainder(
                f"division by (z_{i+1} - z_{j+1}) leaves a remainder"
            )
        return SymPoly(self.field, self.n, quot)

    def evaluate_params(self, bindings) -> "SymPoly":
        return SymPoly(
            self.field,
            self.n,
            {m: c.evaluate(bindings) for m, c in self.terms.items()},
        )

    # -- m-basis ----------------------------------------------------------------

    def to_m(self) -> dict[Partition, RatFun]:
        """Expansion over monomial symmetric functions; input must be symmetric."""
        out: dict[Partition, RatFun] = {}
        seen = set()
        for mono, c in self.terms.items():
            rep = tuple(sorted(mono, reverse=True))
            if rep in seen:
                if self.terms.get(rep, self.field.zero) != self.terms.get(mono):
                    raise ValueError("polynomial is not symmetric")
                continue
            seen.add(rep)
            for other in set(permutations(rep)):
                if self.terms.get(other, self.field.zero) != c:
                    raise ValueError("polynomial is not symmetric")
            out[Partition([e for e in rep if e] or [])] = c
        return out

    @classmethod
    def from_m(cls, field: Field, n: int, coeffs) -> "SymPoly":
        out = cls.zero(field, n)
        for lam, c in coeffs.items():
            if not isinstance(lam, Partition):
                lam = Partition(lam)
            out = out + msf_expand(lam, n, field) * c
        return out

    # -- identity ----------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, _VALUE):
            other = SymPoly(self.field, self.n, {(0,) * self.n: other})
        if not isinstance(other, SymPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for mono in sorted(self.terms, reverse=True):
            body = "*".join(
                f"z{i+1}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(mono)
                if e
            )
            pieces.append((self.terms[mono], body))
        from .opalg import _join_terms

        return _join_terms(pieces)

    def __repr__(self):
        return f"SymPoly({self})"


def msf_expand(lam: Partition | tuple, n: int, field: Field | None = None) -> SymPoly:
    """Monomial symmetric function: distinct permutations, coefficient 1."""
    if not isinstance(lam, Partition):
        lam = Partition(lam)
    if field is None:
        field = Field(["beta"])
    exps = lam.padded(n)
    return SymPoly(field, n, {perm: 1 for perm in set(permutations(exps))})


# -- Sutherland / Jack ------------------------------------------------------------


def sutherland_eigenvalue(lam: Partition | tuple, beta, n: int) -> RatFun:
    """Gauged eigenvalue above the ground state:
    sum_i lambda_i^2 + beta (N+1-2i) lambda_i."""
    if not isinstance(lam, Partition):
        lam = Partition(lam)
    beta, field = _coerce_beta(beta)
    out = field.zero
    for i, part in enumerate(lam.padded(n), start=1):
        out = out + field.ratfun(part * part) + beta * ((n + 1 - 2 * i) * part)
    return out


def _coerce_beta(beta):
    if isinstance(beta, RatFun):
        return beta, beta.field
    field = Field(["beta"])
    return field.ratfun(beta), field


def _pair_part(p: SymPoly) -> SymPoly:
    """sum_{i<j} (z_i + z_j)/(z_i - z_j) (D_i - D_j) applied to p."""
    out = SymPoly.zero(p.field, p.n)
    for i in range(p.n):
        for j in range(i + 1, p.n):
            diff = p.euler(i) - p.euler(j)
            quot = diff.div_diff(i, j)
            out = out + quot.mul_var(i) + quot.mul_var(j)
    return out


def sutherland_apply(p: SymPoly, lam: Partition | tuple, beta, n: int) -> SymPoly:
    """The off-diagonal-plus-scalar operator whose kernel seeds the Jack series.

    Z = beta sum_{i<j} (z_i+z_j)/(z_i-z_j)(D_i-D_j)
        + (sum_i lambda_i^2 - eigenvalue(lambda)).
    The scalar part annihilates the m_lambda component by construction.
    """
    if not isinstance(lam, Partition):
        lam = Partition(lam)
    beta, _ = _coerce_beta(beta)
    p = SymPoly(beta.field, p.n, p.terms)
    scalar = sum((part * part for part in lam.padded(n)), start=0)
    shift = beta.field.ratfun(scalar) - sutherland_eigenvalue(lam, beta, n)
    return _pair_part(p) * beta + p * shift


def _z_matrix_column(mu: Partition, lam: Partition, beta: RatFun, n: int):
    """m-basis expansion of Z m_mu (lambda fixes the scalar part)."""
    p = msf_expand(mu, n, beta.field)
    return sutherland_apply(p, lam, beta, n).to_m()


def jack(lam: Partition | tuple, beta, n: int, max_iter: int = 1000) -> SymPoly:
    """Jack polynomial: m_lambda plus dominance-lower corrections.

    The inverted series sum_k (-S)^k m_lambda is summed exactly: in
    dominance-descending order each coefficient's geometric tail has
    closed form 1/(1 + diagonal), generalizing the one-dimensional
    resummation sum (-beta)^k = 1/(1+beta).  DegenerateDenominator
    reports any reachable mu != lambda with equal sum of squared parts.
    """
    if not isinstance(lam, Partition):
        lam = Partition(lam)
    beta, field = _coerce_beta(beta)
    lam.padded(n)  # validates part count
    weight = lam.weight
    order = sorted(partitions_of(weight, n), key=lambda p: p.padded(n), reverse=True)
    if len(order) > max_iter:
        raise NoConvergence(
            f"{len(order)} partitions of weight {weight} exceeds max_iter={max_iter}"
        )
    n_lam = sum(part * part for part in lam.parts)
    columns: dict[Partition, dict[Partition, RatFun]] = {}
    coeffs: dict[Partition, RatFun] = {}
    for mu in order:
        if mu == lam:
            coeffs[lam] = field.one
            columns[lam] = _z_matrix_column(lam, lam, beta, n)
            if not columns[lam].get(lam, field.zero).is_zero():
                raise DegenerateDenominator(
                    "scalar part fails to annihilate the m_lambda component"
                )
            continue
        incoming = field.zero
        for nu, c_nu in coeffs.items():
            if c_nu.is_zero() or nu == mu:
                continue
            z_mu_nu = columns[nu].get(mu)
            if z_mu_nu is not None:
                incoming = incoming + z_mu_nu * c_nu
        if incoming.is_zero():
            coeffs[mu] = field.zero
            continue
        n_mu = sum(part * part for part in mu.parts)
        if n_mu == n_lam:
            raise DegenerateDenominator(
                f"reachable {mu} has the same squared-part sum as {lam}"
            )
        columns[mu] = _z_matrix_column(mu, lam, beta, n)
        denom = field.ratfun(n_mu - n_lam) + columns[mu].get(mu, field.zero)
        if denom.is_zero():
            raise DegenerateDenominator(f"vanishing resummed denominator at {mu}")
        coeffs[mu] = -incoming / denom
    return SymPoly.from_m(field, n, {p: c for p, c in coeffs.items() if not c.is_zero()})


def jack_residual(lam: Partition | tuple, beta, n: int,
                  poly: SymPoly | None = None) -> SymPoly:
    """[sum D_i^2 + beta pair-part - eigenvalue] applied to the Jack polynomial.

    Exactly zero is the authoritative correctness statement.
    """
    if not isinstance(lam, Partition):
        lam = Partition(lam)
    beta, field = _coerce_beta(beta)
    if poly is None:
        poly = jack(lam, beta, n)
    diag = SymPoly.zero(field, n)
    for i in range(n):
        diag = diag + poly.euler(i).euler(i)
    eig = sutherland_eigenvalue(lam, beta, n)
    return diag + _pair_part(poly) * beta - poly * eig


# -- Calogero ---------------------------------------------------------------------


def lowering_operator(p: SymPoly, beta) -> SymPoly:
    """A p = (1/2) sum_i d_i^2 p + beta sum_{i<j} (d_i - d_j) p / (x_i - x_j)."""
    beta, _ = _coerce_beta(beta)
    p = SymPoly(beta.field, p.n, p.terms)
    out = SymPoly.zero(p.field, p.n)
    for i in range(p.n):
        out = out + p.partial(i).partial(i) * Fraction(1, 2)
    pair = SymPoly.zero(p.field, p.n)
    for i in range(p.n):
        for j in range(i + 1, p.n):
            pair = pair + (p.partial(i) - p.partial(j)).div_diff(i, j)
    return out + pair * beta


def calogero_polynomial(lam: Partition | tuple, beta, n: int) -> SymPoly:
    """Polynomial part of the confined-model eigenfunction.

    Built by the same series inversion as the one-variable closed
    forms: [sum x_i d_i - weight - A] P = 0 seeds at m_lambda, and the
    degree shift of -2 per application of A resums the inverted series
    into exp(-A/2) m_lambda.  The expansion is finite (at most
    weight/2 + 1 terms).
    """
    if not isinstance(lam, Partition):
        lam = Partition(lam)
    beta, field = _coerce_beta(beta)
    lam.padded(n)
    term = msf_expand(lam, n, field)
    total = term
    m = 0
    while not term.is_zero():
        m += 1
        if m > lam.weight // 2 + 2:
            raise NoConvergence("lowering operator failed to terminate")
        term = lowering_operator(term, beta) * Fraction(-1, 2 * m)
        total = total + term
    return total


@dataclass(frozen=True)
class CalogeroReport:
    lam: Partition
    n: int
    energy_above_ground: int
    residual: SymPoly
    ok: bool


def calogero_verify(lam: Partition | tuple, beta, n: int,
                    poly: SymPoly | None = None) -> CalogeroReport:
    """Check [sum x_i d_i - weight - A] P = 0 exactly.

    The eigenvalue above the gauged ground state is the total degree,
    i.e. E_n - E_0 = weight(lambda).
    """
    if not isinstance(lam, Partition):
        lam = Partition(lam)
    beta, field = _coerce_beta(beta)
    if poly is None:
        poly = calogero_polynomial(lam, beta, n)
    euler_sum = SymPoly.zero(field, n)
    for i in range(n):
        euler_sum = euler_sum + poly.euler(i)
    residual = euler_sum - poly * lam.weight - lowering_operator(poly, beta)
    return CalogeroReport(lam, n, lam.weight, residual, residual.is_zero())
