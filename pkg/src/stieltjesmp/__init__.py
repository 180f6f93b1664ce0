"""Tools for truncated matrix moment problems on a half-axis.

The package classifies finite Hermitian moment sequences through their
block-Hankel forms, runs the shift-and-invert transform algorithm and its
inverse, builds the associated resolvent matrix polynomials, and
parametrizes all solutions by linear-fractional transforms of admissible
function pairs.  A small JSON command line front end lives in
``stieltjesmp.cli``.
"""

from .hankel import MomentSequence, classify, stieltjes_parametrization
from .matcore import (
    DEFAULT_TOL,
    GrowthError,
    InconsistencyError,
    PreconditionError,
    SingularDenominatorError,
    ToleranceConfig,
)

__version__ = "0.1.0"

__all__ = [
    "MomentSequence",
    "classify",
    "stieltjes_parametrization",
    "ToleranceConfig",
    "DEFAULT_TOL",
    "PreconditionError",
    "SingularDenominatorError",
    "GrowthError",
    "InconsistencyError",
    "__version__",
]
