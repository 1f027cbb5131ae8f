"""The Clauser-Horne expression and parameter sweeps.

    S = P12(a,b) - P12(a,b') + P12(a',b) + P12(a',b') - P1(a') - P2(b)

Local models satisfy -1 <= S <= 0. The bounds are checked as a closed
interval because deterministic strategies attain both ends exactly.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .scenario import Behavior, Scenario, ValidationError, require_valid

DEFAULT_TOL = 1e-9

# coefficients over Behavior.as_vector() ordering
CH_COEFFS = np.array([1.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 0.0])
TERM_LABELS = ("P12(a,b)", "-P12(a,b')", "P12(a',b)", "P12(a',b')", "-P1(a')", "-P2(b)")


@dataclass(frozen=True)
class CHReport:
    S: float
    terms: tuple[float, float, float, float, float, float]
    lower_ok: bool
    upper_ok: bool
    tol: float

    @property
    def within_bounds(self) -> bool:
        return self.lower_ok and self.upper_ok

    def to_dict(self) -> dict:
        return {"S": self.S, "terms": dict(zip(TERM_LABELS, self.terms)),
                "lower_ok": self.lower_ok, "upper_ok": self.upper_ok, "tol": self.tol}


def ch_statistic(b: Behavior, tol: float = DEFAULT_TOL) -> CHReport:
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    require_valid(b)
    (p11, p12), (p21, p22) = b.joint
    terms = (p11, -p12, p21, p22, -b.single1[1], -b.single2[0])
    s = math.fsum(terms)
    return CHReport(S=s, terms=terms, lower_ok=s > -1.0 - tol, upper_ok=s < 0.0 + tol, tol=tol)


def canonical_family(phi: float) -> Scenario:
    """One-parameter CH family for the singlet, angles in degrees.

    a = 0, a' = -2 phi, b = 180 - phi, b' = 180 - 3 phi. Three of the four
    analyzer pairs sit at 180 - phi and the subtracted pair (a, b') at
    |180 - 3 phi|, so the singlet gives S(phi) = (3 cos^2(phi/2) - cos^2(3 phi/2))/2 - 1,
    maximal at phi = 45 where the settings coincide with Scenario.canonical().
    """
    return Scenario.from_angles(0.0, -2.0 * phi, 180.0 - phi, 180.0 - 3.0 * phi)


@dataclass(frozen=True)
class SweepRow:
    param_deg: float
    report: CHReport


def grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid start, start+step, ... not exceeding stop (up to rounding)."""
    if not step > 0:
        raise ValidationError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ValidationError(f"empty grid: stop {stop} < start {start}")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [start + k * step for k in range(n + 1)]


def ch_sweep(behavior_of: Callable[[Scenario], Behavior], family: Callable[[float], Scenario],
             params: Sequence[float], tol: float = DEFAULT_TOL, workers: int = 1) -> list[SweepRow]:
    """CH report at each parameter value, in parameter order.

    ``behavior_of`` maps a scenario to a behavior, e.g.
    ``functools.partial(state_behavior, psi)`` or ``lambda s: model_behavior(m, s)``.
    """
    params = sorted(float(p) for p in params)
    if not params:
        raise ValidationError("sweep family is empty")

    def one(phi: float) -> SweepRow:
        return SweepRow(phi, ch_statistic(behavior_of(family(phi)), tol))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, params))
    return [one(p) for p in params]


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["param_deg", "S", "lower_ok", "upper_ok"])
    for row in rows:
        r = row.report
        writer.writerow([f"{row.param_deg:.9f}", f"{r.S:.9f}", str(r.lower_ok).lower(), str(r.upper_ok).lower()])
    return buf.getvalue()
