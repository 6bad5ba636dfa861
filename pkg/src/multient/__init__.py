"""
Gaussian states of concurrent parametric processes and their multipartite
entanglement: state construction, PPT spectra, variance-bound criteria and
parameter sweeps.
"""

from .criteria import (
    BoundEvaluation,
    NonlocalObservable,
    analytic_pt_spectrum,
    evaluate_pair,
    four_mode_bound_suite,
    four_mode_observables,
    heisenberg_bound,
    negativity_p13,
    observable_variance,
    ppt_bound,
    tripartite_bound_suite,
    tripartite_observables,
)
from .evolution import (
    QuadraticMomentum,
    crosscheck,
    drift_matrix,
    evolve,
    evolve_vacuum,
    oracle_state,
    propagator,
)
from .gaussian import (
    Covariance,
    EntanglementReport,
    ModePartition,
    enumerate_bipartitions,
    log_negativity,
    parse_partition,
    partial_transpose,
    ppt_report,
    symplectic_form,
    symplectic_spectrum,
    validate_covariance,
)
from .states import (
    GOLDEN_RATIO,
    BlochMessiahSpec,
    FourModeLinearParams,
    FourModeSquareParams,
    TripartiteParams,
    build_state,
    covariance_from_bm,
    four_mode_linear_state,
    four_mode_square_state,
    params_for_point,
    tripartite_state,
)
from .sweep import SweepRow, SweepSpec, build_report, run_sweep, run_verify

__version__ = "0.1.0"

__all__ = [
    "analytic_pt_spectrum",
    "BlochMessiahSpec",
    "BoundEvaluation",
    "build_report",
    "build_state",
    "Covariance",
    "covariance_from_bm",
    "crosscheck",
    "drift_matrix",
    "EntanglementReport",
    "enumerate_bipartitions",
    "evaluate_pair",
    "evolve",
    "evolve_vacuum",
    "four_mode_bound_suite",
    "four_mode_linear_state",
    "four_mode_observables",
    "four_mode_square_state",
    "FourModeLinearParams",
    "FourModeSquareParams",
    "GOLDEN_RATIO",
    "heisenberg_bound",
    "log_negativity",
    "ModePartition",
    "negativity_p13",
    "NonlocalObservable",
    "observable_variance",
    "oracle_state",
    "params_for_point",
    "parse_partition",
    "partial_transpose",
    "ppt_bound",
    "ppt_report",
    "propagator",
    "QuadraticMomentum",
    "run_sweep",
    "run_verify",
    "SweepRow",
    "SweepSpec",
    "symplectic_form",
    "symplectic_spectrum",
    "tripartite_bound_suite",
    "tripartite_observables",
    "tripartite_state",
    "TripartiteParams",
    "validate_covariance",
]
