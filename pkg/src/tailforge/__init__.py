"""Entropy-method concentration bounds and their Monte Carlo verification on
bounded-entry random matrices."""

from .errors import (
    CapacityError,
    CheckFailure,
    ConfigurationError,
    DomainError,
    NumericError,
    PreconditionError,
    ShapeError,
    TailforgeError,
)
from .entropy import (
    CoordinateSpace,
    FunctionTable,
    ProductSpace,
    Tolerances,
    duality_value,
    entropy,
    herbst_mgf_check,
    log_sobolev_gap,
    partial_entropy,
    tensorization_gap,
    variation_value,
)
from .delta import (
    DeltaReport,
    PerturbationChoice,
    Side,
    delta_squared,
    maurer_eig_bounds,
    perturbed_values,
    tail_bound,
)

__all__ = [
    "CapacityError",
    "CheckFailure",
    "ConfigurationError",
    "CoordinateSpace",
    "DeltaReport",
    "DomainError",
    "FunctionTable",
    "NumericError",
    "PerturbationChoice",
    "PreconditionError",
    "ProductSpace",
    "ShapeError",
    "Side",
    "TailforgeError",
    "Tolerances",
    "delta_squared",
    "duality_value",
    "entropy",
    "herbst_mgf_check",
    "log_sobolev_gap",
    "maurer_eig_bounds",
    "partial_entropy",
    "perturbed_values",
    "tail_bound",
    "tensorization_gap",
    "variation_value",
]

__version__ = "0.1.0"
