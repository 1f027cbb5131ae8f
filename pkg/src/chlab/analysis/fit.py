"""Best-fit factorized model for a target behavior.

Multi-start projected coordinate descent with step halving. Each start first
descends on the squared Euclidean gap, which is smooth and easy for
coordinate moves, then continues on the max-norm gap, which is what gets
reported. All iterates stay inside the valid probability box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..hvmodel import FactorizedModel
from ..scenario import Behavior, ValidationError

DEFAULT_STARTS = 16
INITIAL_STEP = 0.25
MIN_STEP = 1e-13


@dataclass(frozen=True)
class FitResult:
    best_model: FactorizedModel
    residual_inf: float
    residual_l2: float
    iterations: int
    seed: int
    start_residuals: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {"best_model": self.best_model.to_dict(), "residual_inf": self.residual_inf,
                "residual_l2": self.residual_l2, "iterations": self.iterations, "seed": self.seed,
                "start_residuals": list(self.start_residuals)}


class _Params:
    """Flat parameter vector [raw weights (K), r1 (2K), r2 (2K)], all in [0, 1]."""

    def __init__(self, k: int):
        self.k = k
        self.size = 5 * k

    def unpack(self, theta: np.ndarray):
        k = self.k
        raw = theta[:k]
        total = raw.sum()
        w = raw / total if total > 0.0 else np.full(k, 1.0 / k)
        return w, theta[k:3 * k].reshape(2, k), theta[3 * k:].reshape(2, k)

    def behavior_vector(self, theta: np.ndarray) -> np.ndarray:
        w, r1, r2 = self.unpack(theta)
        joint = (r1 * w) @ r2.T
        return np.concatenate([joint.ravel(), r1 @ w, r2 @ w])

    def model(self, theta: np.ndarray) -> FactorizedModel:
        w, r1, r2 = self.unpack(theta)
        return FactorizedModel.build(w, r1, r2)


def _coordinate_descent(theta, objective, max_sweeps: int):
    f = objective(theta)
    step = INITIAL_STEP
    sweeps = 0
    while sweeps < max_sweeps and step > MIN_STEP:
        improved = False
        for c in range(theta.size):
            for direction in (1.0, -1.0):
                cand = theta.copy()
                cand[c] = min(1.0, max(0.0, cand[c] + direction * step))
                if cand[c] == theta[c]:
                    continue
                fc = objective(cand)
                if fc < f:
                    theta, f, improved = cand, fc, True
                    break
        sweeps += 1
        if not improved:
            step *= 0.5
    return theta, f, sweeps


def fit_factorized(target: Behavior, lambda_count: int, budget: int = 400, seed: int = 0,
                   starts: int = DEFAULT_STARTS, informed_start: bool = True) -> FitResult:
    """Search factorized models with ``lambda_count`` points for the closest behavior.

    ``budget`` caps the coordinate sweeps per start (split evenly between the
    two phases). Start ``n`` draws from ``default_rng([seed, n])``, so results
    do not depend on the order starts are run in. With ``informed_start`` the
    first start is the independent model built from the target's singles.
    """
    if lambda_count < 1:
        raise ValidationError(f"lambda_count must be >= 1, got {lambda_count}")
    if budget < 1:
        raise ValidationError(f"budget must be >= 1, got {budget}")
    if starts < 1:
        raise ValidationError(f"starts must be >= 1, got {starts}")
    params = _Params(lambda_count)
    t = target.as_vector()

    def l2sq(theta):
        d = params.behavior_vector(theta) - t
        return float(d @ d)

    def linf(theta):
        return float(np.max(np.abs(params.behavior_vector(theta) - t)))

    phase_budget = max(1, budget // 2)
    total_sweeps = 0
    results = []
    for n in range(starts):
        rng = np.random.default_rng([seed, n])
        theta = rng.random(params.size)
        if informed_start and n == 0:
            k = lambda_count
            theta[:k] = 1.0
            theta[k:3 * k] = np.repeat(np.asarray(target.single1), k)
            theta[3 * k:] = np.repeat(np.asarray(target.single2), k)
        theta, _, s1 = _coordinate_descent(theta, l2sq, phase_budget)
        theta, f, s2 = _coordinate_descent(theta, linf, phase_budget)
        total_sweeps += s1 + s2
        results.append((f, n, theta))

    best_f, _, best_theta = min(results, key=lambda r: (r[0], r[1]))
    d = params.behavior_vector(best_theta) - t
    return FitResult(best_model=params.model(best_theta), residual_inf=best_f,
                     residual_l2=float(np.sqrt(d @ d)), iterations=total_sweeps, seed=seed,
                     start_residuals=tuple(r[0] for r in results))
