"""Numerical laboratory for KdV on the half line with Dirichlet control.

Weighted L2 functionals with a smoothed moving cutoff, a theta-scheme solver
for the boundary value problem, energy-identity bookkeeping at one and two
derivatives, trace diagnostics at the boundary, and a whole-line spectral
reference for cross-validation.
"""

from .config import ConfigError, ExperimentConfig, dump_config, load_config, parse_config
from .datagen import (
    KinkSpec,
    ResolutionWarning,
    boundary_pulse,
    gaussian_bump,
    kink_data,
    soliton_boundary,
    soliton_data,
    soliton_solution,
)
from .diagnostics import (
    DiagnosticsConfig,
    DissipationAudit,
    IdentityBreakdown,
    InterpolationCheck,
    RunningDiagnostics,
    TraceIntegral,
    dissipation_audit,
    identity_residual,
    interpolation_check,
    kato_functional,
    maximal_functional,
    propagation_functional,
    smoothing_functional,
    stopping_time,
    strichartz_functional,
    trace_identity_residual,
    trace_integral,
)
from .discretization import Field, Grid1D, TraceSeries, deriv, deriv_matrix, fd_weights, integrate, trace_derivs, weighted_l2
from .oracle import (
    ManufacturedSolution,
    PeriodicGrid,
    WholelineTrajectory,
    decaying_hump,
    extract_halfline_data,
    mms_forcing,
    spectral_restriction,
    wholeline_solve,
)
from .solver import (
    BoundaryData,
    CompatibilityResult,
    SolverConfig,
    SolverError,
    Trajectory,
    check_compatibility,
    solve,
    step,
    zero_boundary,
)
from .weights import CutoffSpec, WeightSpec, chi, eta, moving_weight, rho

__version__ = "0.1.0"

__all__ = [
    "BoundaryData", "CompatibilityResult", "ConfigError", "CutoffSpec",
    "DiagnosticsConfig", "DissipationAudit", "ExperimentConfig", "Field",
    "Grid1D", "IdentityBreakdown", "InterpolationCheck", "KinkSpec",
    "ManufacturedSolution", "PeriodicGrid", "ResolutionWarning",
    "RunningDiagnostics", "SolverConfig", "SolverError", "TraceIntegral",
    "TraceSeries", "Trajectory", "WeightSpec", "WholelineTrajectory",
    "boundary_pulse", "check_compatibility", "chi", "decaying_hump", "deriv",
    "deriv_matrix", "dissipation_audit", "dump_config", "eta",
    "extract_halfline_data", "fd_weights", "gaussian_bump",
    "identity_residual", "integrate", "interpolation_check", "kato_functional",
    "kink_data", "load_config", "maximal_functional", "mms_forcing",
    "moving_weight", "parse_config", "propagation_functional", "rho",
    "smoothing_functional", "solve", "soliton_boundary", "soliton_data",
    "soliton_solution", "spectral_restriction", "step", "stopping_time",
    "strichartz_functional", "trace_derivs", "trace_identity_residual",
    "trace_integral", "weighted_l2", "wholeline_solve", "zero_boundary",
]
