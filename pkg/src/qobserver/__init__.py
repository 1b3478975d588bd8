"""Design, simulation and physical synthesis of direct-coupled quantum observers."""

__version__ = "0.1.0"

from .core import (
    HamiltonianSpec,
    QuadratureSystem,
    RealizabilityReport,
    build_system,
    check_physical_realizability,
    drift_spectrum,
    symplectic,
)
from .observer import (
    DesignReport,
    HomodyneDesign,
    ObserverSpec,
    PlantSpec,
    design_report,
    error_transfer_function,
    optimal_quadrature,
    output_drift_vector,
    steady_state_covariance,
    steady_state_mean,
)
from .ndpa import NdpaParams, RankOneConditionError, SynthesisResult, solve_theta, synthesize
from .sim import EstimatorStats, SimConfig, TrajectoryRecord, estimate_zp, simulate

__all__ = [
    "HamiltonianSpec",
    "QuadratureSystem",
    "RealizabilityReport",
    "build_system",
    "check_physical_realizability",
    "drift_spectrum",
    "symplectic",
    "DesignReport",
    "HomodyneDesign",
    "ObserverSpec",
    "PlantSpec",
    "design_report",
    "error_transfer_function",
    "optimal_quadrature",
    "output_drift_vector",
    "steady_state_covariance",
    "steady_state_mean",
    "NdpaParams",
    "RankOneConditionError",
    "SynthesisResult",
    "solve_theta",
    "synthesize",
    "EstimatorStats",
    "SimConfig",
    "TrajectoryRecord",
    "estimate_zp",
    "simulate",
]
