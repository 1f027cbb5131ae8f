"""Clauser-Horne hidden-variable laboratory.

Finite stochastic hidden-variable models, exact two-qubit predictions, the
CH inequality, local-polytope membership and seeded Monte Carlo, all at desk
scale.
"""

from .scenario import (
    Behavior,
    Direction,
    Outcome,
    Scenario,
    ValidationError,
    theta_between,
    validate_behavior,
)

__version__ = "0.1.0"

__all__ = [
    "Behavior",
    "Direction",
    "Outcome",
    "Scenario",
    "ValidationError",
    "theta_between",
    "validate_behavior",
]
