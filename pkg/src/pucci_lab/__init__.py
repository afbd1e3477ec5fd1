"""Numerical laboratory for Pucci-type extremal operators: a regularized
scalar free-boundary problem, a two-species segregation system, and the
interface diagnostics used to probe their limits."""

from .errors import (
    BlowupError,
    ConfigurationError,
    DomainError,
    InputError,
    ParseError,
    ShootingBracketError,
)
from .grid import (
    GridField,
    GridSpec,
    VectorField,
    bilinear_sample,
    field_from_csv,
    field_to_csv,
    gradient_field,
    make_grid,
    rescale_blowup,
)
from .operators import (
    FAMILY_KINDS,
    OP_SELECTORS,
    Ellipticity,
    MatrixFamily,
    OperatorPair,
    SchemeSpec,
    SymMat2,
    central_hessian,
    discrete_residual,
    eig2,
    family_extremal,
    g_epsilon_eval,
    heaviside_smooth,
    pucci_eval,
    residual_interior,
)
from .solver import (
    SolveConfig,
    SolveResult,
    SweepEntry,
    SweepReport,
    epsilon_sweep,
    lipschitz_seminorm,
    residuals_to_csv,
    solve_dirichlet,
    solve_segregation,
)
from .barriers import (
    FIXTURES,
    BarrierSpec,
    RadialProfile,
    SandwichReport,
    TwoPlaneSpec,
    barrier_gradient_bound,
    barrier_psi,
    gamma_exponent,
    make_fixture,
    radial_profile,
    sandwich_check,
    two_plane_field,
    two_plane_values,
)
from .monotonicity import (
    VERDICTS,
    JrSeries,
    SeriesVerdict,
    j_r,
    j_series_check,
    positive_cell_fraction,
    series_to_csv,
)
from .freeboundary import (
    ConeSpec,
    FreeBoundaryCurve,
    RegularityRecord,
    SlopeFit,
    ball_sup,
    boundary_consistency,
    check_alpha_beta,
    classify_regular,
    epsilon_monotonicity,
    curve_to_csv,
    extract_zero_set,
    fit_two_plane,
    flatness_measure,
)

__version__ = "0.1.0"

__all__ = [
    "BarrierSpec",
    "BlowupError",
    "ConeSpec",
    "ConfigurationError",
    "DomainError",
    "Ellipticity",
    "FAMILY_KINDS",
    "FIXTURES",
    "FreeBoundaryCurve",
    "GridField",
    "GridSpec",
    "InputError",
    "JrSeries",
    "MatrixFamily",
    "OP_SELECTORS",
    "OperatorPair",
    "ParseError",
    "RadialProfile",
    "RegularityRecord",
    "SandwichReport",
    "SchemeSpec",
    "SeriesVerdict",
    "ShootingBracketError",
    "SlopeFit",
    "SolveConfig",
    "SolveResult",
    "SweepEntry",
    "SweepReport",
    "SymMat2",
    "TwoPlaneSpec",
    "VERDICTS",
    "VectorField",
    "ball_sup",
    "barrier_gradient_bound",
    "barrier_psi",
    "bilinear_sample",
    "boundary_consistency",
    "central_hessian",
    "check_alpha_beta",
    "classify_regular",
    "curve_to_csv",
    "discrete_residual",
    "eig2",
    "epsilon_monotonicity",
    "epsilon_sweep",
    "extract_zero_set",
    "family_extremal",
    "field_from_csv",
    "field_to_csv",
    "fit_two_plane",
    "flatness_measure",
    "g_epsilon_eval",
    "gamma_exponent",
    "gradient_field",
    "heaviside_smooth",
    "j_r",
    "j_series_check",
    "lipschitz_seminorm",
    "make_fixture",
    "make_grid",
    "positive_cell_fraction",
    "pucci_eval",
    "radial_profile",
    "rescale_blowup",
    "residual_interior",
    "residuals_to_csv",
    "sandwich_check",
    "series_to_csv",
    "solve_dirichlet",
    "solve_segregation",
    "two_plane_field",
    "two_plane_values",
    "__version__",
]
