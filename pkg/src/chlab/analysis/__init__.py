from .fit import FitResult, fit_factorized
from .independence import (
    outcome_independence_gap,
    outcome_independence_gap_pair,
    parameter_independence_gap,
)
from .polytope import (
    STRATEGIES,
    Certificate,
    DeterministicTable,
    FeasibilityVerdict,
    certificate_distance_bound,
    local_feasibility,
    max_ch_deterministic,
    strategy_behavior,
    verify_certificate,
    verify_feasible,
)

__all__ = [
    "STRATEGIES",
    "Certificate",
    "DeterministicTable",
    "FeasibilityVerdict",
    "FitResult",
    "certificate_distance_bound",
    "fit_factorized",
    "local_feasibility",
    "max_ch_deterministic",
    "outcome_independence_gap",
    "outcome_independence_gap_pair",
    "parameter_independence_gap",
    "strategy_behavior",
    "verify_certificate",
    "verify_feasible",
]
