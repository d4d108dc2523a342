"""k-point semidefinite bounds for spherical codes and equiangular lines."""

from ._core import (
    ConvergenceFailure,
    Error,
    InvalidParameters,
    ParseError,
    TooLarge,
    bound,
    delta_k_finite,
    independence_number,
    orbit_counts,
    reference_bounds,
    sweep,
    theta,
)

__all__ = [
    "ConvergenceFailure",
    "Error",
    "InvalidParameters",
    "ParseError",
    "TooLarge",
    "bound",
    "delta_k_finite",
    "independence_number",
    "orbit_counts",
    "reference_bounds",
    "sweep",
    "theta",
]
