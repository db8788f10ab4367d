"""Convergence-radius bounds for the Mayer series of classical continuous gases."""

from .errors import (
    ClassificationError,
    ClusterRadiusError,
    ConstructionError,
    DomainError,
    EnumerationRangeError,
    SummabilityError,
    TemperednessError,
)
from .potential import (
    Envelope,
    InteractionMatrix,
    PowerExpSum,
    RadialPotential,
    RuelleSplit,
    classify,
    evaluate,
    interaction_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "ClassificationError",
    "ClusterRadiusError",
    "ConstructionError",
    "DomainError",
    "EnumerationRangeError",
    "Envelope",
    "InteractionMatrix",
    "PowerExpSum",
    "RadialPotential",
    "RuelleSplit",
    "SummabilityError",
    "TemperednessError",
    "classify",
    "evaluate",
    "interaction_matrix",
]
