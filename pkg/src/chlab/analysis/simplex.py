"""Dense phase-1 simplex for small equality-form feasibility problems.

Solves  min 1'z  s.t.  A x + D z = b,  x >= 0, z >= 0,  with D = diag(sign b)
so that the artificial start z = |b| is feasible. Bland's rule for both the
entering and leaving choice rules out cycling.

At the optimum the phase-1 dual ``y`` (already mapped back to the original
row signs) satisfies y'A_j <= 0 for every column and y'b = optimum. When the
optimum is positive this is a Farkas certificate that A x = b, x >= 0 has no
solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-12


class SimplexError(RuntimeError):
    pass


@dataclass(frozen=True)
class PhaseOneResult:
    x: np.ndarray
    dual: np.ndarray
    value: float
    pivots: int


def phase_one(A: np.ndarray, b: np.ndarray, max_pivots: int = 10_000) -> PhaseOneResult:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    sign = np.where(b < 0, -1.0, 1.0)

    # tableau [A' | I | b'] with rows flipped so b' >= 0
    T = np.hstack([A * sign[:, None], np.eye(m), (b * sign)[:, None]])
    cost = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))

    pivots = 0
    while True:
        cb = cost[basis]
        reduced = cost - cb @ T[:, :-1]
        entering = next((j for j in range(n + m) if reduced[j] < -PIVOT_TOL), None)
        if entering is None:
            break
        col = T[:, entering]
        rows = [i for i in range(m) if col[i] > PIVOT_TOL]
        if not rows:
            # cannot happen in phase 1, the objective is bounded below by 0
            raise SimplexError("phase-1 objective unbounded")
        ratios = [T[i, -1] / col[i] for i in rows]
        best = min(ratios)
        leaving = min((i for i, r in zip(rows, ratios) if r <= best + PIVOT_TOL), key=lambda i: basis[i])

        T[leaving] /= T[leaving, entering]
        for i in range(m):
            if i != leaving and T[i, entering] != 0.0:
                T[i] -= T[i, entering] * T[leaving]
        basis[leaving] = entering
        pivots += 1
        if pivots > max_pivots:
            raise SimplexError(f"no convergence after {max_pivots} pivots")

    x = np.zeros(n + m)
    for i, j in enumerate(basis):
        x[j] = T[i, -1]
    cb = cost[basis]
    # the artificial columns of the tableau hold B^-1
    dual = (cb @ T[:, n:n + m]) * sign
    value = float(cb @ T[:, -1])
    return PhaseOneResult(x=x[:n], dual=dual, value=value, pivots=pivots)
