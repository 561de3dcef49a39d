"""Exact series inversion of Euler-graded linear differential equations.

The engine writes an equation as [F(D) + P] y = 0 with D = x d/dx and
inverts F on the monomial grading, turning solutions into explicit
series or terminating closed forms over an exact rational-function
coefficient field.  On top of it: classical orthogonal-polynomial
families with verified defining equations, ladder operators built by
nested-commutator conjugation, quasi-exactly-solvable sextic spectra,
a quartic-anharmonic matching scheme, and Jack / confined many-body
polynomial eigenfunctions, all with machine-checkable residuals.
"""

from .coeff import Field, RatFun
from .errors import EuleropError
from .eulersolve import (
    DPoly,
    EulerEquation,
    SeriesSolution,
    euler_split,
    indicial_roots,
    invert_f_on,
    series_solve,
)
from .families import (
    FAMILY_NAMES,
    LADDER_KINDS,
    build_ladder,
    generate,
    oracle,
    verify_de,
    verify_ladder,
)
from .manybody import (
    Partition,
    SymPoly,
    calogero_polynomial,
    calogero_verify,
    jack,
    jack_residual,
    msf_expand,
    sutherland_apply,
    sutherland_eigenvalue,
)
from .opalg import (
    DiffOp,
    Gauge,
    LaurentPoly,
    commutator,
    conjugate,
    exp_apply,
    gauge_conjugate,
)
from .parser import parse_operator
from .spectra import (
    anharmonic_ground,
    derive_trial_matching,
    fd_ground_energy,
    harmonic_quantization_check,
    qes_sextic,
)

__version__ = "0.1.0"

__all__ = [
    "Field", "RatFun", "EuleropError",
    "DPoly", "EulerEquation", "SeriesSolution",
    "euler_split", "indicial_roots", "invert_f_on", "series_solve",
    "FAMILY_NAMES", "LADDER_KINDS",
    "build_ladder", "generate", "oracle", "verify_de", "verify_ladder",
    "Partition", "SymPoly",
    "calogero_polynomial", "calogero_verify", "jack", "jack_residual",
    "msf_expand", "sutherland_apply", "sutherland_eigenvalue",
    "DiffOp", "Gauge", "LaurentPoly",
    "commutator", "conjugate", "exp_apply", "gauge_conjugate",
    "parse_operator",
    "anharmonic_ground", "derive_trial_matching", "fd_ground_energy",
    "harmonic_quantization_check", "qes_sextic",
    "__version__",
]
