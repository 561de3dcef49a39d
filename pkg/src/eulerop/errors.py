"""Exception hierarchy shared by all eulerop modules.

CLI exit-code mapping: parse/usage errors exit 2, mathematical errors
(resonance, poles, degeneracy, non-termination) exit 3, reported
verification failures exit 1.
"""


class EuleropError(Exception):
    """Base class for all package errors."""


# -- coeff ------------------------------------------------------------------

class ZeroDenominator(EuleropError, ZeroDivisionError):
    """A rational function was built with a zero denominator."""


class EvaluationPole(EuleropError, ZeroDivisionError):
    """Parameter bindings make a denominator vanish."""


class UnknownParameter(EuleropError):
    """An identifier is not declared in the session's parameter field."""

    def __init__(self, name, line=None, column=None):
        self.name = name
        self.line = line
        self.column = column
        pos = f" at {line}:{column}" if line is not None else ""
        super().__init__(f"unknown parameter {name!r}{pos}")


class FieldMismatch(EuleropError):
    """Arithmetic attempted between values from incompatible parameter fields."""


# -- opalg ------------------------------------------------------------------

class NonTerminatingBCH(EuleropError):
    """The nested-commutator series did not terminate within max_depth."""


class TruncationRequired(EuleropError):
    """exp_apply needs a cutoff because the series does not terminate."""


# -- eulersolve -------------------------------------------------------------

class ResonanceError(EuleropError):
    """A reached monomial degree k has F(k) = 0, making 1/F(D) singular."""

    def __init__(self, degree, message=None):
        self.degree = degree
        super().__init__(message or f"resonance: F({degree}) = 0")


class NotAnIndicialRoot(EuleropError):
    """series_solve was seeded at lambda with F(lambda) != 0."""


class DegreeZeroPerturbation(EuleropError):
    """The perturbation operator contains an Euler-degree-zero part."""


class NoConvergence(EuleropError):
    """An iteration hit its bound without reaching an exact fixed point."""


# -- families ---------------------------------------------------------------

class UnknownFamily(EuleropError):
    """Family or ladder name not in the registry."""


# -- spectra ----------------------------------------------------------------

class NoPolynomialSolution(EuleropError):
    """No energy value terminates the series at the requested degree."""

    def __init__(self, coefficient, message=None):
        self.coefficient = coefficient
        super().__init__(message or "no common root terminates the series")


class MatchingInconsistent(EuleropError):
    """The symbolically derived cubic differs from E^3 - alpha*E - 3*beta/2."""


# -- manybody ---------------------------------------------------------------

class TooManyParts(EuleropError):
    """Partition has more nonzero parts than there are variables."""


class DivisionRemainder(EuleropError):
    """Exact division by (z_i - z_j) left a nonzero remainder."""


class DegenerateDenominator(EuleropError):
    """A reachable partition mu != lambda has sum(mu_i^2) = sum(lambda_i^2)."""


# -- parser / cli -----------------------------------------------------------

class OperatorSyntaxError(EuleropError):
    """Syntax error in an operator expression, with position and expectations."""

    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        hint = f" (expected one of: {', '.join(self.expected)})" if expected else ""
        super().__init__(f"{message} at {line}:{column}{hint}")
