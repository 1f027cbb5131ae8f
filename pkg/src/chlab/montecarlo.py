"""Seeded event-level simulation of CH detection experiments.

Uniforms come from numpy's Philox, a counter-based generator. The key is
(seed, setting pair) and trial t reads stream positions 3t, 3t+1, 3t+2, so
any chunking of the trials, in any order, reproduces the same events.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np

from .hvmodel import FactorizedModel, SequentialModel
from .inequality import CHReport, ch_statistic
from .scenario import Behavior, Scenario, ValidationError, require_valid

DRAWS_PER_TRIAL = 3
PHILOX_WORDS = 4
CHUNK = 1 << 18  # multiple of PHILOX_WORDS, so chunk starts align with counter blocks
PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))

Source = Union[FactorizedModel, SequentialModel, Behavior]


@dataclass(frozen=True)
class CountsTable:
    """counts[p] = (n_dd, n_dn, n_nd, n_nn) for setting pair PAIRS[p]; d = detected."""

    counts: tuple[tuple[int, int, int, int], ...]
    seed: int
    model_id: str

    def __post_init__(self):
        if len(self.counts) != 4:
            raise ValidationError("counts table needs four setting pairs")
        for p, cell in enumerate(self.counts):
            if len(cell) != 4 or any(c < 0 for c in cell):
                raise ValidationError(f"bad counts for pair {PAIRS[p]}: {cell}")

    def trials(self, p: int) -> int:
        return sum(self.counts[p])

    def to_dict(self) -> dict:
        return {"model_id": self.model_id, "seed": self.seed,
                "pairs": [{"pair": list(PAIRS[p]), "n": self.trials(p),
                           "dd": c[0], "dn": c[1], "nd": c[2], "nn": c[3]}
                          for p, c in enumerate(self.counts)]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "CountsTable":
        cells = {tuple(e["pair"]): (e["dd"], e["dn"], e["nd"], e["nn"]) for e in data["pairs"]}
        return cls(tuple(cells[p] for p in PAIRS), int(data["seed"]), str(data["model_id"]))


def uniforms(seed: int, pair_index: int, first_trial: int, count: int) -> np.ndarray:
    """Uniforms for trials first_trial .. first_trial+count-1, shape (count, 3)."""
    start = first_trial * DRAWS_PER_TRIAL
    if start % PHILOX_WORDS:
        raise ValueError(f"trial offset {first_trial} does not align with a Philox block")
    key = (int(seed) & 0xFFFF_FFFF_FFFF_FFFF) | (int(pair_index) << 64)
    bitgen = np.random.Philox(key=key, counter=[start // PHILOX_WORDS, 0, 0, 0])
    return np.random.Generator(bitgen).random((count, DRAWS_PER_TRIAL))


def _sample_chunk(source, p: int, u: np.ndarray) -> np.ndarray:
    """Detection flags (d1, d2) for one chunk, as two boolean columns."""
    i, j = PAIRS[p]
    if isinstance(source, Behavior):
        p12 = source.joint[i][j]
        p1, p2 = source.single1[i], source.single2[j]
        # cells (d,d), (d,n), (n,d), (n,n)
        cum = np.cumsum([p12, p1 - p12, p2 - p12])
        cell = np.searchsorted(cum, u[:, 0], side="right")
        return np.column_stack([cell <= 1, (cell == 0) | (cell == 2)])
    w = source.weights
    cdf = np.cumsum(w)
    cdf[-1] = 1.0
    lam = np.minimum(np.searchsorted(cdf, u[:, 0], side="right"), w.size - 1)
    if isinstance(source, FactorizedModel):
        d1 = u[:, 1] < source.r1[i, lam]
        d2 = u[:, 2] < source.r2[j, lam]
    else:
        d1 = u[:, 1] < source.r1[i, j, lam]
        r2 = np.where(d1, source.r2_given_plus[i, j, lam], source.r2_given_minus[i, j, lam])
        d2 = u[:, 2] < r2
    return np.column_stack([d1, d2])


def _pair_counts(source, p: int, n: int, seed: int, workers: int) -> tuple[int, int, int, int]:
    starts = list(range(0, n, CHUNK))

    def one(t0):
        flags = _sample_chunk(source, p, uniforms(seed, p, t0, min(CHUNK, n - t0)))
        d1, d2 = flags[:, 0], flags[:, 1]
        return np.array([np.sum(d1 & d2), np.sum(d1 & ~d2), np.sum(~d1 & d2), np.sum(~d1 & ~d2)])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, starts))
    else:
        parts = [one(t0) for t0 in starts]
    return tuple(int(c) for c in np.sum(parts, axis=0))


def simulate(source: Source, n_per_pair: int, seed: int, s: Scenario | None = None,
             workers: int = 1, model_id: str | None = None) -> CountsTable:
    """Draw n_per_pair trials for each of the four setting pairs.

    Models: lambda ~ rho, then side 1, then side 2 (sequential models use the
    branch matching side 1's outcome). Behaviors: the four outcome cells are
    drawn from (P12, P1 - P12, P2 - P12, 1 - P1 - P2 + P12). Response tables
    are indexed by setting, so ``s`` only documents the run.
    """
    if n_per_pair < 1:
        raise ValidationError(f"n_per_pair must be >= 1, got {n_per_pair}")
    if isinstance(source, Behavior):
        require_valid(source)
    elif not isinstance(source, (FactorizedModel, SequentialModel)):
        raise ValidationError(f"cannot simulate {type(source).__name__}")
    counts = tuple(_pair_counts(source, p, int(n_per_pair), seed, workers) for p in range(4))
    return CountsTable(counts, int(seed), model_id or type(source).__name__)


@dataclass(frozen=True)
class Estimate:
    behavior: Behavior
    se: Behavior
    pooling: str = "single1(i) pools pairs (i,0),(i,1); single2(j) pools pairs (0,j),(1,j)"

    def to_dict(self) -> dict:
        return {"behavior": self.behavior.to_dict(), "se": self.se.to_dict(), "pooling": self.pooling}


def _freq(hits: int, n: int) -> tuple[float, float]:
    p = hits / n
    return p, math.sqrt(p * (1.0 - p) / n)


def estimate_behavior(c: CountsTable) -> Estimate:
    """Frequencies with binomial standard errors sqrt(p(1-p)/n)."""
    n = [c.trials(p) for p in range(4)]
    if min(n) < 1:
        raise ValidationError("every setting pair needs at least one trial")
    cells = dict(zip(PAIRS, c.counts))
    ntab = dict(zip(PAIRS, n))
    joint, joint_se = [[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]
    for (i, j), cell in cells.items():
        joint[i][j], joint_se[i][j] = _freq(cell[0], ntab[(i, j)])
    s1, s1_se, s2, s2_se = [], [], [], []
    for k in range(2):
        hits = sum(cells[(k, j)][0] + cells[(k, j)][1] for j in range(2))
        p, se = _freq(hits, ntab[(k, 0)] + ntab[(k, 1)])
        s1.append(p)
        s1_se.append(se)
        hits = sum(cells[(i, k)][0] + cells[(i, k)][2] for i in range(2))
        p, se = _freq(hits, ntab[(0, k)] + ntab[(1, k)])
        s2.append(p)
        s2_se.append(se)
    return Estimate(Behavior.from_arrays(joint, s1, s2), Behavior.from_arrays(joint_se, s1_se, s2_se))


def ch_with_se(est: Estimate) -> tuple[CHReport, float]:
    """CH report of the estimate and the standard error of S, terms treated as independent."""
    report = ch_statistic(est.behavior)
    se = est.se
    terms = (se.joint[0][0], se.joint[0][1], se.joint[1][0], se.joint[1][1], se.single1[1], se.single2[0])
    return report, math.sqrt(math.fsum(t * t for t in terms))


def summary_lines(c: CountsTable) -> list[str]:
    est = estimate_behavior(c)
    lines = []
    for p, (i, j) in enumerate(PAIRS):
        lines.append(f"pair=({i},{j}) n={c.trials(p)} p12_hat={est.behavior.joint[i][j]:.9f} "
                     f"se={est.se.joint[i][j]:.9f}")
    return lines
