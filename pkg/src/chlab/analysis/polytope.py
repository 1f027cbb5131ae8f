"""Deterministic strategies and local-polytope membership.

The local polytope is the convex hull of the 16 deterministic detection
strategies (d1(a), d1(a'), d2(b), d2(b')) in {0,1}^4. A behavior is
reproducible by some factorized model iff it lies in this hull.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..inequality import ch_statistic
from ..scenario import Behavior, require_valid
from .simplex import phase_one

FEAS_TOL = 1e-9

STRATEGIES: tuple[tuple[int, int, int, int], ...] = tuple(itertools.product((0, 1), repeat=4))


def strategy_behavior(strategy) -> Behavior:
    d1a, d1a2, d2b, d2b2 = strategy
    d1, d2 = (d1a, d1a2), (d2b, d2b2)
    joint = [[float(d1[i] * d2[j]) for j in range(2)] for i in range(2)]
    return Behavior.from_arrays(joint, d1, d2)


def vertex_matrix() -> np.ndarray:
    """8 x 16 matrix whose columns are the strategy behavior vectors."""
    return np.column_stack([strategy_behavior(s).as_vector() for s in STRATEGIES])


@dataclass(frozen=True)
class StrategyRow:
    strategy: tuple[int, int, int, int]
    S: float


@dataclass(frozen=True)
class DeterministicTable:
    max_S: float
    min_S: float
    rows: tuple[StrategyRow, ...]


def max_ch_deterministic() -> DeterministicTable:
    rows = tuple(StrategyRow(s, ch_statistic(strategy_behavior(s)).S) for s in STRATEGIES)
    values = [r.S for r in rows]
    return DeterministicTable(max(values), min(values), rows)


@dataclass(frozen=True)
class Certificate:
    """Linear functional f(x) = coefficients . x + offset over behavior vectors."""

    coefficients: tuple[float, ...]
    offset: float
    vertex_max: float
    target_value: float

    def evaluate(self, b: Behavior) -> float:
        return float(np.dot(self.coefficients, b.as_vector()) + self.offset)

    @property
    def gap(self) -> float:
        return self.target_value - self.vertex_max

    def to_dict(self) -> dict:
        return {"coefficients": list(self.coefficients), "offset": self.offset,
                "vertex_max": self.vertex_max, "target_value": self.target_value}


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    weights: Optional[tuple[float, ...]]
    certificate: Optional[Certificate]
    residual: float

    @property
    def status(self) -> str:
        return "Feasible" if self.feasible else "Infeasible"

    def mixture(self) -> Behavior:
        if self.weights is None:
            raise ValueError("infeasible verdict carries no mixture")
        return Behavior.from_vector(vertex_matrix() @ np.array(self.weights))

    def to_dict(self) -> dict:
        out = {"status": self.status, "residual": self.residual}
        if self.feasible:
            out["weights"] = {"".join(map(str, s)): w for s, w in zip(STRATEGIES, self.weights)}
        else:
            out["certificate"] = self.certificate.to_dict()
        return out


def local_feasibility(target: Behavior, tol: float = FEAS_TOL) -> FeasibilityVerdict:
    """Is ``target`` a mixture of deterministic strategies?

    Equalities are met to within ``tol``. An infeasible answer carries a
    functional that is <= 0 on every strategy and > 0 on the target.
    """
    require_valid(target)
    V = vertex_matrix()
    A = np.vstack([V, np.ones(16)])
    rhs = np.concatenate([target.as_vector(), [1.0]])
    res = phase_one(A, rhs)

    if res.value <= tol:
        w = np.where(res.x < 0.0, 0.0, res.x)
        residual = float(np.max(np.abs(A @ w - rhs)))
        return FeasibilityVerdict(True, tuple(w.tolist()), None, residual)

    coeffs, offset = res.dual[:8], float(res.dual[8])
    vertex_vals = coeffs @ V + offset
    cert = Certificate(tuple(coeffs.tolist()), offset, float(vertex_vals.max()),
                       float(coeffs @ target.as_vector() + offset))
    return FeasibilityVerdict(False, None, cert, max(0.0, cert.vertex_max))


def verify_feasible(verdict: FeasibilityVerdict, target: Behavior, tol: float = FEAS_TOL) -> bool:
    """Solver-independent check of a Feasible verdict's mixture."""
    w = np.array(verdict.weights)
    if w.shape != (16,) or np.any(w < 0.0) or abs(math.fsum(w) - 1.0) > tol:
        return False
    mixed = sum(wk * strategy_behavior(s).as_vector() for wk, s in zip(w, STRATEGIES))
    return bool(np.max(np.abs(mixed - target.as_vector())) <= tol)


def verify_certificate(cert: Certificate, target: Behavior, tol: float = FEAS_TOL) -> bool:
    """Solver-independent check: <= tol on all strategies, > 0 on target."""
    vertex_vals = [cert.evaluate(strategy_behavior(s)) for s in STRATEGIES]
    return max(vertex_vals) <= tol and cert.evaluate(target) > 0.0


def certificate_distance_bound(cert: Certificate) -> float:
    """Lower bound on the max-norm distance from the target to the polytope."""
    return cert.gap / math.fsum(abs(c) for c in cert.coefficients)
