"""Exact equiangular sampling theorems on the sphere with TV inpainting."""

from .samples import (
    GridKind,
    GridDescriptor,
    GridMismatchError,
    HarmonicCoeffs,
    SphereSignal,
    make_grid,
    sample_count,
    flat_index,
    theta_node,
    phi_node,
    theta_nodes,
    phi_nodes,
    node_angles,
    random_coeffs,
)
from .wigner import legendre, ylm, DeltaTable, build_delta_table, ylm_matrix
from .dh import DhWeights, dh_weights, dh_forward, dh_inverse, dh_integrate
from .mw import MwWeights, mw_weights, mw_forward, mw_inverse, mw_integrate
from .tv import GradientField, gradient, tv_gradient, tv_norm, gradient_adjoint
from .inpaint import (
    SolveDomain,
    MeasurementOp,
    InpaintProblem,
    SolveResult,
    SolverError,
    ExperimentConfig,
    make_cap_signal,
    make_problem,
    solve_spatial,
    solve_harmonic,
    snr,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "GridKind",
    "GridDescriptor",
    "GridMismatchError",
    "HarmonicCoeffs",
    "SphereSignal",
    "make_grid",
    "sample_count",
    "flat_index",
    "theta_node",
    "phi_node",
    "theta_nodes",
    "phi_nodes",
    "node_angles",
    "random_coeffs",
    "legendre",
    "ylm",
    "DeltaTable",
    "build_delta_table",
    "ylm_matrix",
    "DhWeights",
    "dh_weights",
    "dh_forward",
    "dh_inverse",
    "dh_integrate",
    "MwWeights",
    "mw_weights",
    "mw_forward",
    "mw_inverse",
    "mw_integrate",
    "GradientField",
    "gradient",
    "tv_gradient",
    "tv_norm",
    "gradient_adjoint",
    "SolveDomain",
    "MeasurementOp",
    "InpaintProblem",
    "SolveResult",
    "SolverError",
    "ExperimentConfig",
    "make_cap_signal",
    "make_problem",
    "solve_spatial",
    "solve_harmonic",
    "snr",
    "run_experiment",
    "__version__",
]
