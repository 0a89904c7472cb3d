"""Random brickwork circuits on qudit chains: exact averaged purity from
domain-wall counting, state-vector Monte Carlo, random-projector fidelity
statistics and closed-form complexity bounds."""
from __future__ import annotations

__version__ = "0.1.0"

from .circuit import CircuitGeometry, IntervalSpec, StateVector, run_brickwork
from .domainwall import purity_exact, purity_excess_bounds
from .ensemble import EnsembleEstimate
from .errors import (
    BrickworkError,
    DimensionMismatch,
    InvalidArgument,
    NotPositiveError,
    QuadratureError,
    ResourceLimitError,
    StatisticalCheckFailure,
)
from .rng import RngStream

__all__ = [
    "BrickworkError",
    "CircuitGeometry",
    "DimensionMismatch",
    "EnsembleEstimate",
    "IntervalSpec",
    "InvalidArgument",
    "NotPositiveError",
    "QuadratureError",
    "ResourceLimitError",
    "RngStream",
    "StateVector",
    "StatisticalCheckFailure",
    "purity_exact",
    "purity_excess_bounds",
    "run_brickwork",
]
