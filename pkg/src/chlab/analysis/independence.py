"""Parameter-independence and outcome-independence gaps.

Both are measured at the level of the complete state: for a hidden-variable
model that means per lambda point with positive weight, for a pure quantum
state the state itself plays the role of lambda (a one-point space).
"""

from __future__ import annotations

from typing import Union

import numpy as np

from ..hvmodel import FactorizedModel, SequentialModel
from ..quantum import TwoQubitPureState, outcome_probability
from ..scenario import Direction, Scenario, ValidationError

Source = Union[FactorizedModel, SequentialModel, TwoQubitPureState]


def _sequential(source) -> SequentialModel:
    if isinstance(source, FactorizedModel):
        return source.to_sequential()
    if isinstance(source, SequentialModel):
        return source
    raise ValidationError(f"unsupported source {type(source).__name__}")


def _need_scenario(s):
    if not isinstance(s, Scenario):
        raise ValidationError("a scenario is required for quantum states")
    return s


def _side1_plus(psi, a: Direction, b: Direction) -> float:
    return outcome_probability(psi, a, b, 1, 1) + outcome_probability(psi, a, b, 1, -1)


def _side2_plus(psi, a: Direction, b: Direction) -> float:
    return outcome_probability(psi, a, b, 1, 1) + outcome_probability(psi, a, b, -1, 1)


def parameter_independence_gap(source: Source, s: Scenario | None = None) -> float:
    """Largest change of one side's detection probability when the remote setting changes."""
    if isinstance(source, TwoQubitPureState):
        s = _need_scenario(s)
        gaps = [abs(_side1_plus(source, a, s.b1) - _side1_plus(source, a, s.b2)) for a in s.side1]
        gaps += [abs(_side2_plus(source, s.a1, b) - _side2_plus(source, s.a2, b)) for b in s.side2]
        return max(gaps)
    m = _sequential(source)
    live = m.weights > 0.0
    side1 = np.abs(m.r1[:, 0, live] - m.r1[:, 1, live])
    p2 = m.side2_response()
    side2 = np.abs(p2[0, :, live] - p2[1, :, live])
    return float(max(side1.max(), side2.max()))


def outcome_independence_gap_pair(psi: TwoQubitPureState, a: Direction, b: Direction) -> float:
    """|P2(+ | a, b, side 1 = +1) - P2(+ | a, b)| for a pure state."""
    p1 = _side1_plus(psi, a, b)
    if p1 <= 0.0:
        return 0.0
    return abs(outcome_probability(psi, a, b, 1, 1) / p1 - _side2_plus(psi, a, b))


def outcome_independence_gap(source: Source, s: Scenario | None = None) -> float:
    """Largest change of side 2's detection probability once side 1's +1 outcome is known.

    Entries where side 1 never reports +1 are skipped: conditioning on a
    null event says nothing.
    """
    if isinstance(source, TwoQubitPureState):
        s = _need_scenario(s)
        return max(outcome_independence_gap_pair(source, a, b) for a in s.side1 for b in s.side2)
    m = _sequential(source)
    # r2_plus - (r2_minus + r1 (r2_plus - r2_minus)) = (1 - r1)(r2_plus - r2_minus)
    gap = (1.0 - m.r1) * np.abs(m.r2_given_plus - m.r2_given_minus)
    mask = (m.weights > 0.0)[None, None, :] & (m.r1 > 0.0)
    return float(gap[mask].max()) if mask.any() else 0.0
