import random
from fractions import Fraction

import pytest

from eulerop.coeff import Field
from eulerop.errors import NonTerminatingBCH, TruncationRequired
from eulerop.opalg import (
    DiffOp,
    Gauge,
    LaurentPoly,
    commutator,
    conjugate,
    exp_apply,
    gauge_conjugate,
)


@pytest.fixture
def field():
    return Field(["alpha", "l"])


def test_euler_diagonal_on_monomials(field):
    D = DiffOp.euler(field)
    for k in range(-4, 7):
        mono = LaurentPoly.monomial(field, k)
        assert D.apply(mono) == mono * k


def test_apply_laguerre_exponent_operator(field):
    alpha = field.param("alpha")
    d = DiffOp.deriv(field)
    B = DiffOp.x_power(field) * (d * d) + d * (alpha + 1)
    for n in range(1, 8):
        out = B.apply(LaurentPoly.monomial(field, n))
        assert out == LaurentPoly.monomial(field, n - 1) * (n * (n + alpha))


def test_second_derivative_kills_constant(field):
    d = DiffOp.deriv(field)
    assert (d * d).apply(LaurentPoly.one(field)).is_zero()


def test_commutator_examples(field):
    D = DiffOp.euler(field)
    x = DiffOp.x_power(field)
    d = DiffOp.deriv(field)
    assert commutator(D, x * x) == (x * x) * 2
    assert commutator(D, d * d) == (d * d) * (-2)


def test_commutator_x_with_quarter_dsq(field):
    # oracle: expand both orderings on x^n for n = 0..5
    x = DiffOp.x_power(field)
    A = DiffOp.deriv(field, 2) * Fraction(1, 4)
    claim = DiffOp.deriv(field) * Fraction(-1, 2)
    bracket = commutator(x, A)
    assert bracket == claim
    for n in range(6):
        mono = LaurentPoly.monomial(field, n)
        direct = x.apply(A.apply(mono)) - A.apply(x.apply(mono)) - bracket.apply(mono)
        assert (x * A - A * x).apply(mono) == bracket.apply(mono)
        assert direct.is_zero() or direct == bracket.apply(mono) * 0


def test_grading_law_randomized(field):
    rng = random.Random(42)
    D = DiffOp.euler(field)
    for _ in range(300):
        a = rng.randint(-6, 6)
        b = rng.randint(0, 6)
        term = DiffOp(field, {(a, b): Fraction(rng.randint(1, 5))})
        assert commutator(D, term) == term * (a - b)


def test_normal_ordering_soundness_randomized(field):
    rng = random.Random(43)
    for _ in range(200):
        ta = {(rng.randint(-3, 4), rng.randint(0, 3)): rng.randint(-4, 4)
              for _ in range(rng.randint(1, 3))}
        tb = {(rng.randint(-3, 4), rng.randint(0, 3)): rng.randint(-4, 4)
              for _ in range(rng.randint(1, 3))}
        a = DiffOp(field, ta)
        b = DiffOp(field, tb)
        p = LaurentPoly(field, {rng.randint(-4, 5): rng.randint(-3, 3)
                                for _ in range(rng.randint(1, 3))})
        assert (a * b).apply(p) == a.apply(b.apply(p))


def test_jacobi_randomized(field):
    rng = random.Random(44)
    for _ in range(120):
        ops = []
        for _ in range(3):
            terms = {(rng.randint(-2, 3), rng.randint(0, 2)): rng.randint(-3, 3)
                     for _ in range(rng.randint(1, 2))}
            ops.append(DiffOp(field, terms))
        a, b, c = ops
        total = (
            commutator(commutator(a, b), c)
            + commutator(commutator(b, c), a)
            + commutator(commutator(c, a), b)
        )
        assert total.is_zero()


def test_conjugate_examples(field):
    x = DiffOp.x_power(field)
    d = DiffOp.deriv(field)
    alpha = field.param("alpha")
    A = d * d * Fraction(1, 4)
    assert conjugate(A, x * 2) == x * 2 - d
    assert conjugate(A, d) == d
    B = x * (d * d) + d * (alpha + 1)
    expected = (
        x - (x * d) * 2 - DiffOp.scalar(field, alpha + 1)
        + x * (d * d) + d * (alpha + 1)
    )
    assert conjugate(B, x) == expected


def test_conjugate_is_homomorphism(field):
    d = DiffOp.deriv(field)
    x = DiffOp.x_power(field)
    A = d * d * Fraction(1, 3)
    b1 = x * x - d
    b2 = x * d + 2
    assert conjugate(A, b1 * b2) == conjugate(A, b1) * conjugate(A, b2)


def test_conjugate_nontermination(field):
    d = DiffOp.deriv(field)
    x = DiffOp.x_power(field)
    alpha = field.param("alpha")
    B = x * (d * d) + d * (alpha + 1)
    with pytest.raises(NonTerminatingBCH):
        conjugate(B, d, max_depth=12)


def test_exp_apply_examples(field):
    d = DiffOp.deriv(field)
    x = DiffOp.x_power(field)
    alpha = field.param("alpha")
    A = d * d * Fraction(1, 4)
    out = exp_apply(-A, LaurentPoly.monomial(field, 2))
    assert out == LaurentPoly(field, {2: 1, 0: Fraction(-1, 2)})
    B = x * (d * d) + d * (alpha + 1)
    assert exp_apply(-B, LaurentPoly.one(field)) == LaurentPoly.one(field)
    assert exp_apply(-B, LaurentPoly.monomial(field, 1)) == LaurentPoly(
        field, {1: 1, 0: -(alpha + 1)}
    )


def test_exp_apply_requires_cutoff_for_raising(field):
    x2 = DiffOp.x_power(field, 2)
    with pytest.raises(TruncationRequired):
        exp_apply(x2, LaurentPoly.one(field))
    out = exp_apply(x2, LaurentPoly.one(field), cutoff=6)
    # exp(x^2) truncated: 1 + x^2 + x^4/2 + x^6/6
    assert out == LaurentPoly(
        field, {0: 1, 2: 1, 4: Fraction(1, 2), 6: Fraction(1, 6)}
    )


def test_exp_apply_rejects_mixed_grading(field):
    d = DiffOp.deriv(field)
    x2 = DiffOp.x_power(field, 2)
    with pytest.raises(TruncationRequired):
        exp_apply(x2 + d, LaurentPoly.one(field), cutoff=5)


def test_homomorphism_with_exp_apply(field):
    # similarity-transform mechanism on polynomials of degree <= 10
    rng = random.Random(45)
    d = DiffOp.deriv(field)
    for _ in range(40):
        A = DiffOp.deriv(field, rng.randint(1, 3)) * Fraction(rng.randint(1, 3), 2)
        terms = {(rng.randint(0, 3), rng.randint(0, 2)): rng.randint(-3, 3)
                 for _ in range(rng.randint(1, 2))}
        B = DiffOp(field, terms)
        p = LaurentPoly(field, {rng.randint(0, 10): rng.randint(-3, 3)
                                for _ in range(rng.randint(1, 3))})
        lhs = conjugate(A, B).apply(exp_apply(-A, p))
        rhs = exp_apply(-A, B.apply(p))
        assert lhs == rhs


def test_gauge_conjugation_oscillator(field):
    x = DiffOp.x_power(field)
    d = DiffOp.deriv(field)
    gauge = Gauge.exponential(field, Fraction(-1, 2), 2)
    assert gauge_conjugate(x * 2 - d, gauge) == x - d
    assert gauge_conjugate(d, gauge) == d + x


def test_gauge_conjugation_is_multiplicative(field):
    rng = random.Random(46)
    l = field.param("l")
    gauge = Gauge.power(field, l) * Gauge.exponential(field, Fraction(-1, 2), 1)
    for _ in range(25):
        ta = {(rng.randint(-2, 3), rng.randint(0, 2)): rng.randint(-3, 3)
              for _ in range(rng.randint(1, 2))}
        tb = {(rng.randint(-2, 3), rng.randint(0, 2)): rng.randint(-3, 3)
              for _ in range(rng.randint(1, 2))}
        a = DiffOp(field, ta)
        b = DiffOp(field, tb)
        assert gauge_conjugate(a * b, gauge) == (
            gauge_conjugate(a, gauge) * gauge_conjugate(b, gauge)
        )


def test_gauge_inverse_round_trip(field):
    gauge = Gauge.power(field, field.param("l")) * Gauge.exponential(field, 2, 3)
    d = DiffOp.deriv(field, 2)
    op = DiffOp.x_power(field, 2) * d + d
    assert gauge_conjugate(gauge_conjugate(op, gauge), gauge.inverse()) == op


def test_operator_string_round_trip(field):
    from eulerop.parser import parse_operator

    rng = random.Random(47)
    for _ in range(150):
        terms = {(rng.randint(-3, 4), rng.randint(0, 3)):
                 Fraction(rng.randint(-5, 5), rng.randint(1, 4))
                 for _ in range(rng.randint(1, 4))}
        op = DiffOp(field, terms)
        assert parse_operator(str(op), field) == op
