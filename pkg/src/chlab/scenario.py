"""Directions, CH scenarios and observable behaviors.

Setting indices are 0-based throughout the package: side-1 index 0 is the
analyzer a, index 1 is a'; side-2 index 0 is b, index 1 is b'.

A "+1" spin outcome and a "detected" event are the same thing here, so one
Behavior type carries both readings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

NORM_TOL = 1e-12
PROB_TOL = 1e-12


class ValidationError(ValueError):
    """Raised when an input violates a domain invariant."""


@dataclass(frozen=True)
class Direction:
    """Unit vector giving an analyzer orientation."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if not math.isfinite(norm) or abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"direction ({self.x}, {self.y}, {self.z}) has norm {norm!r}, expected 1")

    @classmethod
    def from_angle(cls, degrees: float) -> "Direction":
        """Planar direction in the x-z plane, measured from +z towards +x."""
        rad = math.radians(degrees)
        return cls(math.sin(rad), 0.0, math.cos(rad))

    @classmethod
    def from_vector(cls, vec: Sequence[float]) -> "Direction":
        if len(vec) != 3:
            raise ValidationError(f"direction needs 3 components, got {len(vec)}")
        return cls(*(float(v) for v in vec))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def to_list(self) -> list[float]:
        return [self.x, self.y, self.z]


def theta_between(a: Direction, b: Direction) -> float:
    """Angle between two analyzer directions in degrees, in [0, 180]."""
    if not isinstance(a, Direction) or not isinstance(b, Direction):
        raise ValidationError("theta_between expects Direction arguments")
    dot = a.x * b.x + a.y * b.y + a.z * b.z
    cx = a.y * b.z - a.z * b.y
    cy = a.z * b.x - a.x * b.z
    cz = a.x * b.y - a.y * b.x
    # atan2 keeps full precision near 0 and 180 degrees, where arccos does not
    return math.degrees(math.atan2(math.sqrt(cx * cx + cy * cy + cz * cz), dot))


@dataclass(frozen=True)
class Scenario:
    """The four analyzer settings of one CH experiment."""

    a1: Direction
    a2: Direction
    b1: Direction
    b2: Direction

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            if not isinstance(getattr(self, name), Direction):
                raise ValidationError(f"scenario field {name} is not a Direction")

    @classmethod
    def from_angles(cls, a1: float, a2: float, b1: float, b2: float) -> "Scenario":
        return cls(*(Direction.from_angle(d) for d in (a1, a2, b1, b2)))

    @classmethod
    def canonical(cls) -> "Scenario":
        """Settings a=0, a'=270, b=135, b'=45 degrees, where the singlet violates CH maximally."""
        return cls.from_angles(0.0, 270.0, 135.0, 45.0)

    @property
    def side1(self) -> tuple[Direction, Direction]:
        return (self.a1, self.a2)

    @property
    def side2(self) -> tuple[Direction, Direction]:
        return (self.b1, self.b2)

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        deg_keys = ("a1_deg", "a2_deg", "b1_deg", "b2_deg")
        vec_keys = ("a1", "a2", "b1", "b2")
        if all(k in data for k in deg_keys):
            return cls.from_angles(*(float(data[k]) for k in deg_keys))
        if all(k in data for k in vec_keys):
            return cls(*(Direction.from_vector(data[k]) for k in vec_keys))
        raise ValidationError(f"scenario needs keys {deg_keys} or {vec_keys}")

    def to_dict(self) -> dict:
        return {"a1": self.a1.to_list(), "a2": self.a2.to_list(), "b1": self.b1.to_list(), "b2": self.b2.to_list()}


@dataclass(frozen=True)
class Outcome:
    detected1: bool
    detected2: bool


@dataclass(frozen=True)
class Violation:
    constraint: str
    entry: str
    margin: float

    def __str__(self):
        return f"{self.constraint} at {self.entry} (margin {self.margin:.3e})"


@dataclass(frozen=True)
class Verdict:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class Behavior:
    """Four joint and four single detection probabilities.

    ``joint[i][j]`` is P12 for side-1 setting i and side-2 setting j;
    ``single1[i]`` and ``single2[j]`` are the one-sided probabilities.
    """

    joint: tuple[tuple[float, float], tuple[float, float]]
    single1: tuple[float, float]
    single2: tuple[float, float]

    def __post_init__(self):
        joint = tuple(tuple(float(p) for p in row) for row in self.joint)
        single1 = tuple(float(p) for p in self.single1)
        single2 = tuple(float(p) for p in self.single2)
        if len(joint) != 2 or any(len(r) != 2 for r in joint) or len(single1) != 2 or len(single2) != 2:
            raise ValidationError("behavior must have a 2x2 joint table and two singles per side")
        object.__setattr__(self, "joint", joint)
        object.__setattr__(self, "single1", single1)
        object.__setattr__(self, "single2", single2)

    @classmethod
    def from_arrays(cls, joint, single1, single2) -> "Behavior":
        joint = np.asarray(joint, dtype=float)
        return cls(tuple(map(tuple, joint.tolist())), tuple(np.asarray(single1, float).tolist()),
                   tuple(np.asarray(single2, float).tolist()))

    @classmethod
    def from_vector(cls, vec) -> "Behavior":
        """Inverse of :meth:`as_vector`."""
        v = [float(x) for x in vec]
        if len(v) != 8:
            raise ValidationError(f"behavior vector needs 8 entries, got {len(v)}")
        return cls(((v[0], v[1]), (v[2], v[3])), (v[4], v[5]), (v[6], v[7]))

    def as_vector(self) -> np.ndarray:
        """Entries ordered P12(0,0), P12(0,1), P12(1,0), P12(1,1), P1(0), P1(1), P2(0), P2(1)."""
        return np.array([*self.joint[0], *self.joint[1], *self.single1, *self.single2])

    @property
    def joint_array(self) -> np.ndarray:
        return np.array(self.joint)

    def to_dict(self) -> dict:
        return {"joint": [list(r) for r in self.joint], "single1": list(self.single1), "single2": list(self.single2)}

    @classmethod
    def from_dict(cls, data: dict) -> "Behavior":
        try:
            return cls(data["joint"], data["single1"], data["single2"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed behavior: {exc}") from exc


BEHAVIOR_LABELS = ("joint(0,0)", "joint(0,1)", "joint(1,0)", "joint(1,1)",
                   "single1(0)", "single1(1)", "single2(0)", "single2(1)")


def validate_behavior(b: Behavior, tol: float = PROB_TOL) -> Verdict:
    """Check range and Frechet bounds; every violation is reported."""
    found = []
    for label, p in zip(BEHAVIOR_LABELS, b.as_vector()):
        if not math.isfinite(p):
            found.append(Violation("range", label, math.inf))
        elif p < -tol:
            found.append(Violation("range", label, -p))
        elif p > 1.0 + tol:
            found.append(Violation("range", label, p - 1.0))
    for i in range(2):
        for j in range(2):
            p12, p1, p2 = b.joint[i][j], b.single1[i], b.single2[j]
            upper = min(p1, p2)
            lower = max(0.0, p1 + p2 - 1.0)
            if p12 > upper + tol:
                found.append(Violation("frechet-upper", f"joint({i},{j})", p12 - upper))
            if p12 < lower - tol:
                found.append(Violation("frechet-lower", f"joint({i},{j})", lower - p12))
    return Verdict(tuple(found))


def require_valid(b: Behavior) -> Behavior:
    verdict = validate_behavior(b)
    if not verdict.ok:
        raise ValidationError("invalid behavior: " + "; ".join(map(str, verdict.violations)))
    return b
