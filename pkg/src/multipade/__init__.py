"""Shared-denominator rational interpolation on disks, segments, and
ellipse regions, with rate predictions from declared singularities.

The solver side (compute_mhp, run_row_sequence) measures; the oracle
side (system_poles, r_values, predicted_theta) predicts from the
symbolic function models.  The two meet in the CLI checks.
"""

from . import errors
from .analysis import (
    ConvergenceReport,
    FitResult,
    approximant_error_scan,
    derivative_rate_check,
    estimate_rho0,
    fit_rate,
    geometric_decay_test,
    probe_points,
    run_incomplete_sequence,
    run_row_sequence,
    track_convergence,
)
from .config import ExperimentConfig, config_from_dict, load_config
from .funcs import (
    FunctionModel,
    SystemModel,
    entire_exp,
    evaluate,
    log_branch,
    rational,
    rho_meromorphy,
    rho_zero,
    sqrt_branch,
)
from .geometry import (
    GeometrySpec,
    LevelCurve,
    NodeTable,
    capacity_constant,
    equilibrium_potential,
    level_curve,
    nodes,
    phi,
    psi,
)
from .mhp import (
    MHPResult,
    approximant_eval,
    compute_incomplete,
    compute_mhp,
    quadrature_level,
)
from .oracle import (
    SystemPoleSet,
    polynomial_independence,
    predicted_theta,
    r_values,
    system_poles,
)
from .poly import ComplexPolynomial

__version__ = "0.1.0"

__all__ = [
    "ComplexPolynomial",
    "ConvergenceReport",
    "ExperimentConfig",
    "FitResult",
    "FunctionModel",
    "GeometrySpec",
    "LevelCurve",
    "MHPResult",
    "NodeTable",
    "SystemModel",
    "SystemPoleSet",
    "approximant_error_scan",
    "approximant_eval",
    "capacity_constant",
    "compute_incomplete",
    "compute_mhp",
    "config_from_dict",
    "derivative_rate_check",
    "entire_exp",
    "equilibrium_potential",
    "errors",
    "estimate_rho0",
    "evaluate",
    "fit_rate",
    "geometric_decay_test",
    "level_curve",
    "load_config",
    "log_branch",
    "nodes",
    "phi",
    "polynomial_independence",
    "predicted_theta",
    "probe_points",
    "psi",
    "quadrature_level",
    "r_values",
    "rational",
    "rho_meromorphy",
    "rho_zero",
    "run_incomplete_sequence",
    "run_row_sequence",
    "sqrt_branch",
    "system_poles",
    "track_convergence",
    "__version__",
]
