import random
from fractions import Fraction
from math import factorial

import pytest

from eulerop.coeff import Field
from eulerop.errors import (
    DegreeZeroPerturbation,
    NotAnIndicialRoot,
    ResonanceError,
)
from eulerop.eulersolve import (
    DPoly,
    EulerEquation,
    euler_split,
    indicial_roots,
    invert_f_on,
    series_solve,
)
from eulerop.opalg import DiffOp, LaurentPoly, exp_apply


@pytest.fixture
def field():
    return Field(["E", "n", "alpha", "gamma"])


def harmonic_equation(field):
    E = field.param("E")
    D = DPoly.gen(field)
    return EulerEquation(
        D * (D - 1),
        DiffOp.x_power(field, 2) * (2 * E) - DiffOp.x_power(field, 4),
    )


def harmonic_oracle(field, kmax):
    """Independent recurrence: (2k+2)(2k+1) c_{k+1} = c_{k-1} - 2E c_k."""
    E = field.param("E")
    cs = [field.one, -E]
    while len(cs) <= kmax:
        k = len(cs) - 1
        prev = cs[k - 1] if k >= 1 else field.zero
        cs.append((prev - 2 * E * cs[k]) / ((2 * k + 2) * (2 * k + 1)))
    return cs


class TestIndicialRoots:
    def test_harmonic(self, field):
        D = DPoly.gen(field)
        roots = indicial_roots(D * (D - 1))
        assert roots.integers == (0, 1)
        assert roots.symbolic == ()

    def test_symbolic_root(self, field):
        D = DPoly.gen(field)
        n = field.param("n")
        roots = indicial_roots(D - n)
        assert roots.integers == ()
        assert roots.symbolic == (n,)

    def test_bound_pair(self, field):
        D = DPoly.gen(field)
        n = field.param("n")
        roots = indicial_roots((D + n) * (D - n), bindings={"n": 3})
        assert roots.integers == (-3, 3)

    def test_no_rational_roots(self, field):
        D = DPoly.gen(field)
        roots = indicial_roots(D * D - 2)
        assert roots.integers == ()
        assert roots.symbolic == ()


class TestInvert:
    def test_simple(self, field):
        D = DPoly.gen(field)
        out = invert_f_on(D * (D - 1), LaurentPoly.monomial(field, 2))
        assert out == LaurentPoly(field, {2: Fraction(1, 2)})

    def test_shift_rule_first_factor(self, field):
        # f = D - n at degree n-2 gives -1/2
        D = DPoly.gen(field)
        f = D - 7
        out = invert_f_on(f, LaurentPoly.monomial(field, 5))
        assert out == LaurentPoly(field, {5: Fraction(-1, 2)})

    def test_resonance(self, field):
        D = DPoly.gen(field)
        with pytest.raises(ResonanceError) as err:
            invert_f_on(D * (D - 1), LaurentPoly.monomial(field, 1))
        assert err.value.degree == 1

    def test_inverse_of_diffop_action(self, field):
        D = DPoly.gen(field)
        f = D * (D - 1) + 5
        op = f.as_diffop()
        rng = random.Random(3)
        for _ in range(20):
            p = LaurentPoly(field, {rng.randint(-4, 6): rng.randint(-5, 5)
                                    for _ in range(rng.randint(1, 3))})
            assert invert_f_on(f, op.apply(p)) == p


class TestSeriesSolve:
    def test_harmonic_against_recurrence_oracle(self, field):
        eq = harmonic_equation(field)
        sol = series_solve(eq, 0, 12)
        oracle = harmonic_oracle(field, 6)
        for k, ck in enumerate(oracle):
            assert sol.coefficient(2 * k) == ck
        assert not sol.terminated

    def test_harmonic_frozen_values(self, field):
        # frozen from the recurrence oracle above
        E = field.param("E")
        eq = harmonic_equation(field)
        sol = series_solve(eq, 0, 6)
        assert sol.coefficient(2) == -E
        assert sol.coefficient(4) == (2 * E ** 2 + 1) / field.ratfun(12)
        assert sol.coefficient(6) == -(2 * E ** 3 + 7 * E) / field.ratfun(180)
        # the printed sixth coefficient elsewhere agrees with this one at
        # the quantized energy 1/2 even though the two differ as polynomials
        stated = -(field.ratfun(24) + 8 * E + 16 * E ** 3) / field.ratfun(1440)
        assert sol.coefficient(6) != stated
        assert (
            sol.coefficient(6).evaluate({"E": Fraction(1, 2)})
            == stated.evaluate({"E": Fraction(1, 2)})
        )

    def test_hermite_terminates(self, field):
        D = DPoly.gen(field)
        d = DiffOp.deriv(field)
        eq = EulerEquation(D - 2, d * d * Fraction(-1, 2))
        sol = series_solve(eq, 2, 10)
        assert sol.terminated
        assert sol.body == LaurentPoly(field, {2: 1, 0: Fraction(-1, 2)})
        assert eq.residual(sol.body).is_zero()

    def test_confluent_hypergeometric_series(self, field):
        D = DPoly.gen(field)
        d = DiffOp.deriv(field)
        gamma = field.param("gamma")
        alpha = field.param("alpha")
        f = D * (D - 1) + DPoly(field, (0, 1)) * gamma
        p = -(DiffOp.x_power(field, 2) * d) - DiffOp.x_power(field) * alpha
        sol = series_solve(EulerEquation(f, p), 0, 2)
        assert sol.coefficient(0) == 1
        assert sol.coefficient(1) == alpha / gamma
        assert sol.coefficient(2) == (alpha * (alpha + 1)) / (gamma * (gamma + 1) * 2)

    def test_not_an_indicial_root(self, field):
        eq = harmonic_equation(field)
        with pytest.raises(NotAnIndicialRoot):
            series_solve(eq, 3, 10)

    def test_degree_zero_perturbation_rejected(self, field):
        D = DPoly.gen(field)
        with pytest.raises(DegreeZeroPerturbation):
            EulerEquation(D * (D - 1), DiffOp.euler(field) * 2)

    def test_residual_contract_randomized(self, field):
        rng = random.Random(9)
        D = DPoly.gen(field)
        for _ in range(30):
            terms = {}
            for _ in range(rng.randint(1, 2)):
                b = rng.randint(0, 1)
                a = b + rng.randint(1, 3)
                terms[(a, b)] = Fraction(rng.randint(-3, 3))
            p = DiffOp(field, terms)
            if p.is_zero():
                continue
            eq = EulerEquation(D, p)
            cutoff = 9
            sol = series_solve(eq, 0, cutoff)
            residual = eq.residual(sol.body)
            d_plus = max(p.degrees())
            if sol.terminated:
                assert residual.is_zero()
                assert sol.residual_degree is None
            else:
                assert all(k > cutoff - d_plus for k in residual.terms)
                assert sol.residual_degree == cutoff - d_plus + 1

    def test_quantization_specialization(self, field):
        # symbolic series specialized to E = 1/2 equals the Gaussian Taylor series
        eq = harmonic_equation(field)
        sol = series_solve(eq, 0, 20)
        for k in range(0, 21, 2):
            expected = Fraction((-1) ** (k // 2), 2 ** (k // 2) * factorial(k // 2))
            assert sol.coefficient(k).evaluate({"E": Fraction(1, 2)}) == expected

    def test_matches_exp_apply_route(self, field):
        # f = D - n with degree-lowering P: series equals the exponential form
        D = DPoly.gen(field)
        d = DiffOp.deriv(field)
        alpha = field.param("alpha")
        for n in range(0, 9):
            eq = EulerEquation(D - n, d * d * Fraction(-1, 2))
            sol = series_solve(eq, n, n)
            expform = exp_apply(d * d * Fraction(-1, 4), LaurentPoly.monomial(field, n))
            assert sol.body == expform
            assert sol.terminated
        B = DiffOp.x_power(field) * (d * d) + d * (alpha + 1)
        for n in range(0, 7):
            eq = EulerEquation(D - n, -B)
            sol = series_solve(eq, n, n)
            assert sol.body == exp_apply(-B, LaurentPoly.monomial(field, n))

    def test_second_root_gives_odd_solution(self, field):
        eq = harmonic_equation(field)
        sol = series_solve(eq, 1, 7)
        assert sol.coefficient(1) == 1
        assert all(k % 2 == 1 for k in sol.body.terms)


class TestEulerSplit:
    def test_harmonic_split(self, field):
        E = field.param("E")
        op = (
            DiffOp.euler(field) * DiffOp.euler(field)
            - DiffOp.euler(field)
            + DiffOp.x_power(field, 2) * (2 * E)
            - DiffOp.x_power(field, 4)
        )
        f, p = euler_split(op)
        D = DPoly.gen(field)
        assert f == D * D - D
        assert p == DiffOp.x_power(field, 2) * (2 * E) - DiffOp.x_power(field, 4)

    def test_xk_dk_blocks(self, field):
        # x^2 d^2 = D(D-1)
        op = DiffOp(field, {(2, 2): 1})
        f, p = euler_split(op)
        D = DPoly.gen(field)
        assert p.is_zero()
        assert f == D * (D - 1)
        for k in range(-3, 6):
            assert f(k) == k * (k - 1)
