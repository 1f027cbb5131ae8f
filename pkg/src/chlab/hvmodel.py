"""Finite stochastic hidden-variable models.

Two classes of model over a finite lambda-space with weights rho:

* ``FactorizedModel``: P12(i, j, lam) = r1[i, lam] * r2[j, lam]. Each side's
  response depends only on its own setting.
* ``SequentialModel``: P12(i, j, lam) = r1[i, j, lam] * r2_plus[i, j, lam],
  the plain conditional-probability decomposition. Side 1 may depend on the
  remote setting and side 2 on both settings and on side 1's outcome
  (``r2_plus`` after +1, ``r2_minus`` after -1).

Observable probabilities are rho-weighted sums over lambda.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .scenario import Behavior, Scenario, ValidationError, require_valid

WEIGHT_EXACT_TOL = 1e-12
WEIGHT_LOAD_TOL = 1e-9


def _frozen(arr, shape_desc: str, name: str, ndim: int) -> np.ndarray:
    out = np.array(arr, dtype=float)
    if out.ndim != ndim:
        raise ValidationError(f"{name} must have shape {shape_desc}, got {out.shape}")
    out.setflags(write=False)
    return out


def _check_probabilities(arr: np.ndarray, name: str):
    bad = np.argwhere(~((arr >= 0.0) & (arr <= 1.0)))
    if bad.size:
        idx = tuple(int(i) for i in bad[0])
        raise ValidationError(f"{name}{list(idx)} = {arr[idx]!r} is outside [0, 1]")


@dataclass(frozen=True, eq=False)
class LambdaSpace:
    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights, "(K,)", "weights", 1)
        if w.size == 0:
            raise ValidationError("lambda-space needs at least one point")
        bad = np.flatnonzero(~(w >= 0.0) | ~np.isfinite(w))
        if bad.size:
            raise ValidationError(f"weights[{bad[0]}] = {w[bad[0]]!r} is negative or not finite")
        total = float(w.sum())
        dev = abs(total - 1.0)
        if dev > WEIGHT_LOAD_TOL:
            raise ValidationError(f"weights sum to {total!r}, expected 1")
        if dev > WEIGHT_EXACT_TOL:
            warnings.warn(f"weights sum to {total!r}; renormalizing", stacklevel=3)
            w = w / total
            w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.weights.size

    def average(self, values: np.ndarray) -> np.ndarray:
        """rho-weighted sum over the trailing lambda axis."""
        return values @ self.weights


@dataclass(frozen=True, eq=False)
class FactorizedModel:
    """Responses r1[i, lam] = P1(a_i, lam) and r2[j, lam] = P2(b_j, lam)."""

    lambda_space: LambdaSpace
    r1: np.ndarray
    r2: np.ndarray

    def __post_init__(self):
        k = self.lambda_space.size
        for name in ("r1", "r2"):
            arr = _frozen(getattr(self, name), "(2, K)", name, 2)
            if arr.shape != (2, k):
                raise ValidationError(f"{name} must have shape (2, {k}), got {arr.shape}")
            _check_probabilities(arr, name)
            object.__setattr__(self, name, arr)

    @classmethod
    def build(cls, weights, r1, r2) -> "FactorizedModel":
        return cls(LambdaSpace(weights), r1, r2)

    @property
    def weights(self) -> np.ndarray:
        return self.lambda_space.weights

    def to_sequential(self) -> "SequentialModel":
        """The same model written in sequential form (no remote dependence)."""
        k = self.lambda_space.size
        r1 = np.broadcast_to(self.r1[:, None, :], (2, 2, k))
        r2 = np.broadcast_to(self.r2[None, :, :], (2, 2, k))
        return SequentialModel(self.lambda_space, r1, r2, r2)

    def to_dict(self) -> dict:
        return {"type": "factorized", "weights": self.weights.tolist(),
                "r1": self.r1.tolist(), "r2": self.r2.tolist()}


@dataclass(frozen=True, eq=False)
class SequentialModel:
    """Responses indexed [side-1 setting, side-2 setting, lambda]."""

    lambda_space: LambdaSpace
    r1: np.ndarray
    r2_given_plus: np.ndarray
    r2_given_minus: np.ndarray

    def __post_init__(self):
        k = self.lambda_space.size
        for name in ("r1", "r2_given_plus", "r2_given_minus"):
            arr = _frozen(getattr(self, name), "(2, 2, K)", name, 3)
            if arr.shape != (2, 2, k):
                raise ValidationError(f"{name} must have shape (2, 2, {k}), got {arr.shape}")
            _check_probabilities(arr, name)
            object.__setattr__(self, name, arr)

    @classmethod
    def build(cls, weights, r1, r2_given_plus, r2_given_minus=None) -> "SequentialModel":
        if r2_given_minus is None:
            r2_given_minus = r2_given_plus
        return cls(LambdaSpace(weights), r1, r2_given_plus, r2_given_minus)

    @property
    def weights(self) -> np.ndarray:
        return self.lambda_space.weights

    def side2_response(self) -> np.ndarray:
        """P2(+1, lam | a_i, b_j) with side 1's outcome summed out."""
        # written so that equal branches give r2_given_minus back exactly
        return self.r2_given_minus + self.r1 * (self.r2_given_plus - self.r2_given_minus)

    def to_dict(self) -> dict:
        return {"type": "sequential", "weights": self.weights.tolist(), "r1": self.r1.tolist(),
                "r2_given_plus": self.r2_given_plus.tolist(),
                "r2_given_minus": self.r2_given_minus.tolist()}


Model = Union[FactorizedModel, SequentialModel]


def joint_prob_factorized(m: FactorizedModel, i: int, j: int) -> float:
    return float(np.sum(m.weights * m.r1[i] * m.r2[j]))


def joint_prob_sequential(m: SequentialModel, i: int, j: int) -> float:
    return float(np.sum(m.weights * m.r1[i, j] * m.r2_given_plus[i, j]))


def side1_average(m: SequentialModel, i: int, j: int) -> float:
    """Average over lambda of P1(+1, lam | a_i, b_j)."""
    return float(np.sum(m.weights * m.r1[i, j]))


def side2_conditional_average(m: SequentialModel, i: int, j: int) -> float:
    """Average over lambda of P2(+1, lam | a_i, b_j, side 1 = +1).

    This is the plain rho-average of the conditioned response, not the
    Bayes-correct conditional of the averaged model.
    """
    return float(np.sum(m.weights * m.r2_given_plus[i, j]))


def lambda_covariance(m: SequentialModel, i: int, j: int) -> float:
    """E[r1 r2_plus] - E[r1] E[r2_plus] over lambda at setting pair (i, j).

    Zero exactly when the average of the product equals the product of the
    averages, i.e. when the joint splits into the side-1 average times the
    side-2 conditional average.
    """
    if isinstance(m, FactorizedModel):
        m = m.to_sequential()
    return joint_prob_sequential(m, i, j) - side1_average(m, i, j) * side2_conditional_average(m, i, j)


def model_behavior(m: Model, s: Scenario | None = None) -> Behavior:
    """Observable behavior of a model.

    Response tables are indexed by setting, so the scenario only labels the
    settings and does not enter the numbers. For sequential models the side-1
    single is pooled (averaged) over the two remote settings and the side-2
    single uses total probability over side 1's outcome, pooled the same
    way. A model whose marginals depend on the remote setting strongly
    enough to break the Frechet bounds after pooling is rejected.
    """
    if isinstance(m, FactorizedModel):
        joint = [[joint_prob_factorized(m, i, j) for j in range(2)] for i in range(2)]
        single1 = m.lambda_space.average(m.r1)
        single2 = m.lambda_space.average(m.r2)
        return require_valid(Behavior.from_arrays(joint, single1, single2))
    if isinstance(m, SequentialModel):
        joint = [[joint_prob_sequential(m, i, j) for j in range(2)] for i in range(2)]
        single1 = m.lambda_space.average(m.r1).mean(axis=1)
        single2 = m.lambda_space.average(m.side2_response()).mean(axis=0)
        return require_valid(Behavior.from_arrays(joint, single1, single2))
    raise ValidationError(f"not a hidden-variable model: {type(m).__name__}")


def model_from_dict(data: dict) -> Model:
    kind = data.get("type")
    try:
        if kind == "factorized":
            return FactorizedModel.build(data["weights"], data["r1"], data["r2"])
        if kind == "sequential":
            return SequentialModel.build(data["weights"], data["r1"], data["r2_given_plus"],
                                         data.get("r2_given_minus"))
    except KeyError as exc:
        raise ValidationError(f"{kind} model is missing field {exc}") from exc
    raise ValidationError(f"unknown model type {kind!r}; expected 'factorized' or 'sequential'")


def load_model(path: str | Path) -> Model:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def random_factorized(rng: np.random.Generator, lambda_count: int) -> FactorizedModel:
    w = rng.dirichlet(np.ones(lambda_count))
    return FactorizedModel.build(w, rng.random((2, lambda_count)), rng.random((2, lambda_count)))


def deterministic_model(d1, d2) -> FactorizedModel:
    """One-point model where side 1 detects at setting i iff d1[i], likewise side 2."""
    return FactorizedModel.build([1.0], np.asarray(d1, float)[:, None], np.asarray(d2, float)[:, None])
