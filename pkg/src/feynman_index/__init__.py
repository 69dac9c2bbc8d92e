"""Numerical spectral invariants, Feynman propagators and index computations
for Dirac-type operators on circles and globally hyperbolic cylinders."""

from .errors import ErrorCode, OperationError
from .estimators import EtaEstimator, FrequencySplitter
from .eta import EtaResult, eta_heat, eta_smeared, eta_zeta
from .index_engine import fredholm_pair_index, index_report, spectral_flow
from .operators import CircleOperatorSpec, CylinderModel, GaugePath, build_circle_dirac, build_jordan_model
from .spectral import OperatorMatrix, RaySpec, frequency_projectors, schur_clusters

__version__ = "0.1.0"

__all__ = [
    "CircleOperatorSpec",
    "CylinderModel",
    "ErrorCode",
    "EtaEstimator",
    "EtaResult",
    "FrequencySplitter",
    "GaugePath",
    "OperationError",
    "OperatorMatrix",
    "RaySpec",
    "build_circle_dirac",
    "build_jordan_model",
    "eta_heat",
    "eta_smeared",
    "eta_zeta",
    "fredholm_pair_index",
    "frequency_projectors",
    "index_report",
    "schur_clusters",
    "spectral_flow",
]
