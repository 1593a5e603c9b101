"""Discretely blended Bernstein-Bezier quasi-interpolants on quasi-uniform grids."""

__version__ = "0.1.0"

from .bernstein import BernsteinContext, bernstein_eval, dual_apply, elevation_matrix
from .errors import (
    BlendError,
    DegreeOrder,
    EmptyInput,
    InsufficientData,
    IntervalMismatch,
    InvalidSpec,
    NonFiniteSample,
    NotIncreasing,
    NotInGrid,
    SingularMatrix,
)
from .expr import Expression, parse_expression
from .linalg import inf_norm, lu_factor, lu_solve
from .piecewise import (
    ConvergenceTable,
    PiecewiseSurface,
    convergence_study,
    fit_order,
    fit_piecewise,
    sup_error,
)
from .projectors import LevelProjector, build_projector, eval_dual_basis, project
from .spec import (
    BlendSpec,
    dimension,
    elevate_to_divisible,
    index_sequences,
    lower_set,
    normalize_sequences,
    permutation_check,
    predicted_order,
    quasi_uniform_grid,
    stability_factor,
)
from .surface import BlendedSpace, BlendedSurface, Rect, control_net, dual_basis_eval, evaluate, fit
