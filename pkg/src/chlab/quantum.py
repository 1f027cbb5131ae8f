"""Two spin-1/2 particles: closed-form singlet values and a projector engine.

The closed forms are what the CH analysis uses; ``state_behavior`` evaluates
any pure two-qubit state with explicit spin projectors and serves as the
independent check on them.

Note on the conditional: P2(+ | side-1 outcome -1) is cos^2(theta/2), not
sin^2(theta/2). Only the latter is compatible with P1 = 1/2 and
P12 = sin^2(theta/2)/2 through total probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import Behavior, Direction, Scenario, ValidationError, theta_between

STATE_NORM_TOL = 1e-12
SCHMIDT_DET_TOL = 1e-10

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


def singlet_marginal() -> float:
    return 0.5


def singlet_joint(a: Direction, b: Direction) -> float:
    """P(+1, +1) for the singlet: sin^2(theta_ab / 2) / 2."""
    half = math.radians(theta_between(a, b)) / 2.0
    return 0.5 * math.sin(half) ** 2


def singlet_conditional(a: Direction, b: Direction, conditioned_outcome: int = 1) -> float:
    """P(side 2 gives +1 | side 1 gave ``conditioned_outcome``) for the singlet."""
    half = math.radians(theta_between(a, b)) / 2.0
    if conditioned_outcome == 1:
        return math.sin(half) ** 2
    if conditioned_outcome == -1:
        return math.cos(half) ** 2
    raise ValidationError(f"conditioned outcome must be +1 or -1, got {conditioned_outcome!r}")


@dataclass(frozen=True)
class TwoQubitPureState:
    """Amplitudes (c00, c01, c10, c11); the first index belongs to particle 1."""

    amplitudes: tuple[complex, complex, complex, complex]

    def __post_init__(self):
        amps = tuple(complex(c) for c in self.amplitudes)
        if len(amps) != 4:
            raise ValidationError(f"two-qubit state needs 4 amplitudes, got {len(amps)}")
        norm2 = sum(abs(c) ** 2 for c in amps)
        if not math.isfinite(norm2) or abs(norm2 - 1.0) > STATE_NORM_TOL:
            raise ValidationError(f"state is not normalized: sum |c|^2 = {norm2!r}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def singlet(cls) -> "TwoQubitPureState":
        r = 1.0 / math.sqrt(2.0)
        return cls((0.0, r, -r, 0.0))

    @classmethod
    def product(cls, u, v) -> "TwoQubitPureState":
        """Tensor product of two single-qubit states (normalized here)."""
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        u = u / np.linalg.norm(u)
        v = v / np.linalg.norm(v)
        return cls(tuple(np.kron(u, v)))

    @classmethod
    def normalized(cls, amplitudes) -> "TwoQubitPureState":
        vec = np.asarray(amplitudes, dtype=complex)
        return cls(tuple(vec / np.linalg.norm(vec)))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.amplitudes, dtype=complex)

    @property
    def matrix(self) -> np.ndarray:
        """Amplitude matrix [[c00, c01], [c10, c11]]."""
        return self.vector.reshape(2, 2)

    def to_dict(self) -> dict:
        return {"amplitudes": [[c.real, c.imag] for c in self.amplitudes]}

    @classmethod
    def from_dict(cls, data: dict) -> "TwoQubitPureState":
        try:
            amps = [complex(float(re), float(im)) for re, im in data["amplitudes"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed state: {exc}") from exc
        return cls(tuple(amps))


def spin_projector(n: Direction, outcome: int = 1) -> np.ndarray:
    """(1 + outcome * n.sigma) / 2."""
    n_sigma = np.tensordot(n.vector, PAULI, axes=1)
    return 0.5 * (IDENTITY + outcome * n_sigma)


def expectation(psi: TwoQubitPureState, op: np.ndarray) -> float:
    vec = psi.vector
    return float(np.real(np.vdot(vec, op @ vec)))


def outcome_probability(psi: TwoQubitPureState, a: Direction, b: Direction, o1: int, o2: int) -> float:
    """P(spin along a gives o1 and spin along b gives o2), o1, o2 in {+1, -1}."""
    return expectation(psi, np.kron(spin_projector(a, o1), spin_projector(b, o2)))


def state_behavior(psi: TwoQubitPureState, s: Scenario) -> Behavior:
    if not isinstance(psi, TwoQubitPureState):
        raise ValidationError("state_behavior expects a TwoQubitPureState")
    joint = [[expectation(psi, np.kron(spin_projector(a), spin_projector(b))) for b in s.side2] for a in s.side1]
    single1 = [expectation(psi, np.kron(spin_projector(a), IDENTITY)) for a in s.side1]
    single2 = [expectation(psi, np.kron(IDENTITY, spin_projector(b))) for b in s.side2]
    return Behavior.from_arrays(joint, single1, single2)


def singlet_behavior(s: Scenario) -> Behavior:
    """Behavior assembled from the closed-form singlet values."""
    joint = [[singlet_joint(a, b) for b in s.side2] for a in s.side1]
    m = singlet_marginal()
    return Behavior.from_arrays(joint, [m, m], [m, m])


def schmidt_rank(psi: TwoQubitPureState) -> int:
    """1 for a product state, 2 for an entangled one."""
    if not isinstance(psi, TwoQubitPureState):
        raise ValidationError("schmidt_rank expects a TwoQubitPureState")
    c00, c01, c10, c11 = psi.amplitudes
    return 2 if abs(c00 * c11 - c01 * c10) > SCHMIDT_DET_TOL else 1


def random_direction(rng: np.random.Generator) -> Direction:
    """Uniform on the sphere: z uniform in [-1, 1], azimuth uniform."""
    z = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    r = math.sqrt(max(0.0, 1.0 - z * z))
    vec = np.array([r * math.cos(phi), r * math.sin(phi), z])
    return Direction.from_vector(vec / np.linalg.norm(vec))


def random_qubit(rng: np.random.Generator) -> np.ndarray:
    vec = rng.normal(size=2) + 1j * rng.normal(size=2)
    return vec / np.linalg.norm(vec)


def random_product_state(rng: np.random.Generator) -> TwoQubitPureState:
    return TwoQubitPureState.product(random_qubit(rng), random_qubit(rng))
