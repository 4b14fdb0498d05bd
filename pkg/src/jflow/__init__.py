"""Numerical laboratory for the J-flow on flat complex 2-tori.

The package integrates the gradient flow of the J energy on a periodic
4d grid with spectral differentiation, monitors every a-priori estimate
of the flow as a runtime diagnostic, and cross-checks the flow limit
against an independently computed critical metric obtained by solving
the reduced complex Monge-Ampere equation with a damped Newton-Krylov
iteration.
"""

from .config import RunConfig, parse_config, serialize_config, with_overrides
from .errors import (ConfigError, DecayFitError, FlowDomainError,
                     HypothesisViolationError, InconsistencyError, JFlowError,
                     NonConvergenceError, PositivityError,
                     SnapshotFormatError, ValidationError)
from .flow import (FlowState, RunResult, flow_rhs, make_state, run, stable_dt,
                   step_rk4)
from .functionals import (CSV_COLUMNS, DiagnosticsRecord, diagnostics,
                          epsilon_margin, fit_decay_rate, gauge_residual,
                          i_functional, j_functional, recipe_a)
from .grid import (complex_hessian, coordinates, integrate, sup_inf,
                   synthesize_modes, validate_shape)
from .hermitian import (EPS_PD, Herm2, adjugate, det, eigenvalues, h_tensor,
                        herm, identity, is_positive_definite, min_eigenvalue,
                        mixed_det, positive_definite_mask, trace_contract)
from .model import (SurfaceModel, build_surface_model, compute_c,
                    model_from_values, normalize_background)
from .oracle import (MAProblem, NewtonResult, build_ma_problem,
                     compare_with_flow, critical_chi, entry_differences,
                     ma_residual, newton_solve)
from .snapshots import read_snapshot, write_form_field, write_scalar_field

__version__ = "0.1.0"

__all__ = [
    "CSV_COLUMNS", "ConfigError", "DecayFitError", "DiagnosticsRecord",
    "EPS_PD", "FlowDomainError", "FlowState", "Herm2",
    "HypothesisViolationError", "InconsistencyError", "JFlowError",
    "MAProblem", "NewtonResult", "NonConvergenceError", "PositivityError",
    "RunConfig", "RunResult", "SnapshotFormatError", "SurfaceModel",
    "ValidationError", "adjugate", "build_ma_problem", "build_surface_model",
    "compare_with_flow", "complex_hessian", "compute_c", "coordinates",
    "critical_chi", "det", "diagnostics", "eigenvalues", "entry_differences",
    "epsilon_margin", "fit_decay_rate", "flow_rhs", "gauge_residual",
    "h_tensor", "herm", "i_functional", "identity", "integrate",
    "is_positive_definite", "j_functional", "ma_residual", "make_state",
    "min_eigenvalue", "mixed_det", "model_from_values", "newton_solve",
    "normalize_background", "parse_config", "positive_definite_mask",
    "read_snapshot", "recipe_a", "run", "serialize_config", "stable_dt",
    "step_rk4", "sup_inf", "synthesize_modes", "trace_contract",
    "validate_shape", "with_overrides", "write_form_field",
    "write_scalar_field",
]
