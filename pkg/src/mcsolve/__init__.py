"""Spectral Newton solvers for prescribed mean curvature graphs.

Minimal, constant mean curvature and capillary (gravity) surfaces over
rectangles, disks and annuli, with Dirichlet or contact-angle boundary
data, discretised by Chebyshev and Chebyshev-Fourier collocation.
"""

from .errors import (
    CompatibilityError,
    ConfigError,
    ContinuationError,
    DivergenceError,
    GeometryError,
    MCSolveError,
    OutOfDomainError,
    ResolutionError,
)
from .geometry import Annulus, Disk, Interval, Rectangle
from .operators import (
    Capillary,
    CapillaryAngle,
    Cmc,
    Dirichlet,
    Minimal,
    Pin,
    ProblemSpec,
    check_compatibility,
    cmc_from_capillary,
    frechet,
    residual,
)
from .solver import SolverConfig, Solution, adaptive_solve, continuation_solve, newton_solve
from .spectral import ScalarField, assemble, evaluate, evaluate_polar, resample, sample

__version__ = "0.1.0"
