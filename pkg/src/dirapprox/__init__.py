"""Dirichlet-polynomial approximation toolkit.

Submodules
----------
series    Dirichlet polynomials, seminorms, sup norms, abscissa estimates
bohr      prime-power multi-indices and the polynomial/polydisc dictionary
geometry  compact subsets of the plane: sampling, translation, contours
fit       discrete minimax fitting with and without coefficient constraints
laurent   Laurent decomposition on holed domains, rational Dirichlet fits
universal one partial-sum ladder approximating a whole family of targets
chordal   Riemann-sphere chordal metric and zeta convergence checks
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("dirapprox")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0.dev0"

from . import errors
from .bohr import LiftedPolynomial, bohr_gap_report, lift, unlift
from .chordal import (
    INFINITY,
    ConvergenceReport,
    SpherePoint,
    chi,
    chi_many,
    chi_uniform_error,
    chordal_convergence_check,
    zeta_chordal_convergence_check,
)
from .fit import (
    FitOptions,
    FitResult,
    TargetFunction,
    constrained_fit,
    convergence_study,
    minimax_fit,
)
from .geometry import (
    SampleDensity,
    annulus,
    disc,
    discretize,
    jordan_polygon,
    rectangle,
    translate,
    union_of_disjoint,
)
from .laurent import (
    LaurentPieces,
    RationalDirichletFunction,
    laurent_decompose,
    rational_dirichlet_fit,
)
from .series import (
    AbscissaReport,
    CoefficientRule,
    DirichletPolynomial,
    Sentinel,
    estimate_abscissas,
    evaluate,
    evaluate_many,
    seminorm_sigma,
    shift_by_delta,
    sup_norm_halfplane,
)
from .universal import (
    FamilyEntry,
    TargetFamily,
    UniversalOptions,
    UniversalSchedule,
    build_universal,
    compact_rectangle,
    verify_schedule,
)

__all__ = [
    "errors",
    "AbscissaReport",
    "CoefficientRule",
    "DirichletPolynomial",
    "Sentinel",
    "estimate_abscissas",
    "evaluate",
    "evaluate_many",
    "seminorm_sigma",
    "shift_by_delta",
    "sup_norm_halfplane",
    "LiftedPolynomial",
    "bohr_gap_report",
    "lift",
    "unlift",
    "SampleDensity",
    "annulus",
    "disc",
    "discretize",
    "jordan_polygon",
    "rectangle",
    "translate",
    "union_of_disjoint",
    "FitOptions",
    "FitResult",
    "TargetFunction",
    "constrained_fit",
    "convergence_study",
    "minimax_fit",
    "LaurentPieces",
    "RationalDirichletFunction",
    "laurent_decompose",
    "rational_dirichlet_fit",
    "FamilyEntry",
    "TargetFamily",
    "UniversalOptions",
    "UniversalSchedule",
    "build_universal",
    "compact_rectangle",
    "verify_schedule",
    "INFINITY",
    "ConvergenceReport",
    "SpherePoint",
    "chi",
    "chi_many",
    "chi_uniform_error",
    "chordal_convergence_check",
    "zeta_chordal_convergence_check",
    "__version__",
]
