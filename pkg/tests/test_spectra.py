from fractions import Fraction

import pytest

from eulerop.coeff import Field
from eulerop.errors import MatchingInconsistent, NoPolynomialSolution
from eulerop.opalg import LaurentPoly
from eulerop.spectra import (
    AnharmonicResult,
    anharmonic_ground,
    derive_trial_matching,
    fd_ground_energy,
    harmonic_quantization_check,
    isolate_real_roots,
    poly_gcd,
    qes_gauged_operator,
    qes_sextic,
    rational_roots,
)


class TestRootMachinery:
    def test_rational_roots(self):
        # (E - 8)(E + 8) E  ->  E^3 - 64 E
        assert rational_roots([Fraction(0), Fraction(-64), Fraction(0), Fraction(1)]) == [
            Fraction(-8), Fraction(0), Fraction(8),
        ]
        assert rational_roots([Fraction(-1, 2), Fraction(1)]) == [Fraction(1, 2)]

    def test_isolation_of_irrationals(self):
        # E^2 - 2: two irrational roots
        rats, ivals = isolate_real_roots([Fraction(-2), Fraction(0), Fraction(1)])
        assert rats == []
        assert len(ivals) == 2
        for lo, hi in ivals:
            assert hi - lo <= Fraction(1, 10 ** 12)
            assert (lo * lo - 2) * (hi * hi - 2) < 0

    def test_isolation_mixed(self):
        # (E - 1)(E^2 - 3)
        coeffs = [Fraction(3), Fraction(-3), Fraction(-1), Fraction(1)]
        rats, ivals = isolate_real_roots(coeffs)
        assert rats == [Fraction(1)]
        assert len(ivals) == 2

    def test_poly_gcd(self):
        # gcd((E-1)(E-2), (E-1)(E-3)) = E - 1 (monic)
        a = [Fraction(2), Fraction(-3), Fraction(1)]
        b = [Fraction(3), Fraction(-4), Fraction(1)]
        assert poly_gcd(a, b) == [Fraction(-1), Fraction(1)]


class TestHarmonic:
    def test_gaussian_match_and_wrong_energy(self):
        rep = harmonic_quantization_check(12)
        assert rep.matches_gaussian
        assert rep.wrong_energy_detected
        assert rep.first_mismatch_degree == 4

    def test_symbolic_x2_coefficient(self):
        rep = harmonic_quantization_check(4)
        field = rep.series.body.field
        E = field.param("E")
        assert rep.series.coefficient(2) == -E

    def test_wrong_energy_value(self):
        rep = harmonic_quantization_check(4)
        wrong = rep.series.coefficient(4).evaluate({"E": Fraction(3, 2)})
        assert wrong == (Fraction(1) + 2 * Fraction(3, 2) ** 2) / 12
        assert wrong != Fraction(1, 8)

    def test_cutoff_validation(self):
        with pytest.raises(ValueError):
            harmonic_quantization_check(3)


class TestQES:
    def test_paper_case_n4(self):
        res = qes_sextic(4, gamma=1)
        assert res.alpha == -11
        assert res.energies == (Fraction(-8), Fraction(0), Fraction(8))
        assert res.isolated == ()
        assert res.single_coefficient_suffices
        assert res.residuals_ok
        funcs = {e: psi for e, psi, _ in res.eigenfunctions}
        field = Field(["E"])
        assert funcs[Fraction(-8)] == LaurentPoly(field, {0: 1, 2: 4, 4: 2})
        assert funcs[Fraction(8)] == LaurentPoly(field, {0: 1, 2: -4, 4: 2})
        assert funcs[Fraction(0)] == LaurentPoly(field, {0: 1, 4: Fraction(-2, 3)})
        assert all(b == Fraction(1, 4) for _, _, b in res.eigenfunctions)

    def test_n0(self):
        res = qes_sextic(0, gamma=1)
        assert res.alpha == -3
        assert res.energies == (Fraction(0),)
        assert res.eigenfunctions[0][1] == LaurentPoly(Field(["E"]), {0: 1})

    def test_energy_polynomial_degree(self):
        for n in (0, 2, 4, 6):
            res = qes_sextic(n, gamma=1)
            assert len(res.energy_polynomial) - 1 == n // 2 + 1

    def test_spectrum_symmetry(self):
        for n in (2, 4):
            res = qes_sextic(n, gamma=1)
            values = set(res.energies)
            assert values == {-e for e in values}

    def test_parity_of_eigenfunctions(self):
        for n in (0, 2, 4, 6):
            res = qes_sextic(n, gamma=1)
            for _, psi, _ in res.eigenfunctions:
                assert all(k % 2 == 0 for k in psi.terms)

    def test_gauge_constraint(self):
        res = qes_sextic(4, gamma=Fraction(9, 4))
        assert 16 * res.b ** 2 == res.gamma
        assert -res.alpha / res.g == 11

    def test_irrational_energies_isolated(self):
        res = qes_sextic(2, gamma=9)
        assert res.energies == ()
        assert len(res.isolated) == 2
        # roots of E^2 - 8g = E^2 - 24
        for lo, hi in res.isolated:
            assert hi - lo <= Fraction(1, 10 ** 12)
            assert (lo * lo - 24) * (hi * hi - 24) <= 0

    def test_residuals_checked_against_gauged_operator(self):
        res = qes_sextic(4, gamma=1)
        field = Field(["E"])
        for e, psi, _ in res.eigenfunctions:
            op = qes_gauged_operator(field, res.g, res.alpha, e)
            assert op.apply(psi).is_zero()

    def test_gamma_must_be_square(self):
        with pytest.raises(ValueError):
            qes_sextic(4, gamma=2)

    def test_g_directly(self):
        res = qes_sextic(4, g=1)
        assert res.gamma == 1 and res.energies == (Fraction(-8), Fraction(0), Fraction(8))

    def test_odd_n_rejected(self):
        with pytest.raises(ValueError):
            qes_sextic(3, gamma=1)


class TestAnharmonic:
    def test_matching_derivation(self):
        der = derive_trial_matching()
        field = der.mu_rule.field
        E, alpha, beta = field.params("E", "alpha", "beta")
        assert der.mu_rule == E / field.ratfun(2)
        assert der.nu_rule == (E ** 2 - alpha) / field.ratfun(12)
        assert der.matches_target
        # matching relations:  mu^2/2 - nu = 2 alpha/4! + E^2/4!
        lhs = der.mu_rule ** 2 / field.ratfun(2) - der.nu_rule
        rhs = 2 * alpha / field.ratfun(24) + E ** 2 / field.ratfun(24)
        assert lhs == rhs

    def test_cubic_coefficients(self):
        der = derive_trial_matching()
        field = der.mu_rule.field
        alpha, beta = field.params("alpha", "beta")
        assert der.cubic_monic == (
            beta * Fraction(-3, 2), -alpha, field.zero, field.one,
        )

    def test_harmonic_limit_exact(self):
        res = anharmonic_ground(1, 0, oracle=False)
        assert res.e0 == 1.0
        assert res.e0_exact == 1

    def test_weak_coupling_against_fd_oracle(self):
        res = anharmonic_ground(1, Fraction(1, 10))
        assert res.cubic_residual < 1e-12
        assert res.oracle_e0 is not None
        assert abs(res.e0 - res.oracle_e0) / res.oracle_e0 < 0.10

    def test_closed_form_branch(self):
        # large beta pushes the radicand positive
        res = anharmonic_ground(1, 10, oracle=False)
        assert res.closed_form_used
        assert res.cubic_residual < 1e-12

    def test_mu_nu_from_root(self):
        res = anharmonic_ground(1, 0, oracle=False)
        assert res.mu == 0.5
        assert res.nu == 0.0

    def test_wavefunction_coefficients(self):
        res = anharmonic_ground(1, 0, oracle=False)
        wf = dict(res.wavefunction)
        assert wf[0] == 1.0
        assert wf[2] == -0.5  # Gaussian exp(-x^2/2) at the harmonic point
        assert wf[4] == 0.125

    def test_oracle_harmonic_value(self):
        assert abs(fd_ground_energy(1, 0) - 1.0) < 1e-3

    def test_regime_validation(self):
        with pytest.raises(ValueError):
            anharmonic_ground(-1, 0)
        with pytest.raises(ValueError):
            anharmonic_ground(1, -1)
