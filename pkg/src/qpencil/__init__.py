"""Forward and inverse spectral computations for a quadratic pencil.

The pencil ``-y'' + 2 lam p(x) y + q(x) y = lam^2 rho(x) y`` has periodic
complex potentials with positive harmonics only and the step weight
``rho = 1`` for ``x >= 0``, ``-beta^2`` for ``x < 0``.
"""

from .errors import *  # noqa: F401,F403
from .potential import FourierPotential, evaluate_potential, random_potential, validate_potential
from .recurrence import VTable, build_vtable, invert_recurrences, recurrence_residuals
from .solutions import (
    FundamentalSystem,
    SolutionKind,
    SolutionSample,
    eval_solution,
    residue_function,
    wronskian,
)
from .spectral import (
    ConnectionCoefficients,
    SpectralData,
    assemble_spectral_data,
    connection_coefficients,
    find_eigenvalues,
    spectral_singularities,
)
from .inverse import (
    DiagonalSet,
    extract_diagonal,
    invert,
    recover_beta,
    recover_potential,
    reconstruct_tables,
)

__version__ = "0.1.0"
