"""Space-time matrix factorization with Helmholtz-regularized spatial modes.

Decomposes a space x time matrix Y into a sum of rank-1 modes d_i x_i^T
where each spatial column d_i is softly pushed towards solutions of the
discrete Helmholtz equation L d = -k^2 d.  The solver alternates block
gradient descent with a globally-solvable polar problem that both
certifies optimality and supplies new columns.
"""

from wavefactor.errors import (
    DimensionError,
    DivergedStepError,
    NumericalError,
    PreconditionError,
)
from wavefactor.spectral import (
    FilterSpec,
    Laplacian,
    SpectralBasis,
    apply_A,
    apply_A_inv_half,
    build_laplacian,
    eigendecompose,
    filter_coefficients,
    spectrum,
)
from wavefactor.polar import (
    LineSearchConfig,
    PolarSolution,
    line_search_objective,
    lipschitz_bound,
    optimality_gap,
    solve_polar,
)
from wavefactor.solver import (
    FactorModel,
    SolverConfig,
    SolverTrace,
    append_mode,
    block_descent_pass,
    descend_to_stationary,
    factorize,
    objective,
    optimal_tau,
    theta_bar,
)

__version__ = "0.1.0"
