"""Optimal partial matching between persistence diagrams.

The p-Wasserstein cost pairs off-diagonal points of two diagrams, letting any
point match its orthogonal projection onto the diagonal instead. The ground
metric is Euclidean on the plane, so per-pair costs are ||a - b||^p and the
exact optimum is a balanced assignment on the augmented cost matrix in which
each diagram is padded with one dedicated diagonal slot per opposing point.

The matching is kept around because the loss needs it: the derivative of the
cost with respect to the moving diagram's coordinates only flows through the
matched pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import MatchingConsistencyError, ParameterError
from .persistence import PersistenceDiagram, PersistencePoint

__all__ = [
    "DIAGONAL",
    "DiagramMatching",
    "diagonal_gap",
    "wasserstein_pp",
    "matching_oracle",
    "matching_subgradient",
]

# index value standing in for the diagonal inside matching pairs
DIAGONAL = None


@dataclass(frozen=True)
class DiagramMatching:
    """An optimal partial matching: (index in A | None, index in B | None) pairs."""

    pairs: tuple[tuple[int | None, int | None], ...]
    cost: float
    p: float


def diagonal_gap(point: PersistencePoint) -> float:
    """Euclidean distance from (birth, death) to the diagonal."""
    return (point.death - point.birth) / math.sqrt(2.0)


def _pair_cost(a: PersistencePoint, b: PersistencePoint, p: float) -> float:
    return math.hypot(a.birth - b.birth, a.death - b.death) ** p


def _recompute_cost(
    a: PersistenceDiagram,
    b: PersistenceDiagram,
    pairs: tuple[tuple[int | None, int | None], ...],
    p: float,
) -> float:
    total = 0.0
    for ia, ib in pairs:
        if ia is not None and ib is not None:
            total += _pair_cost(a.points[ia], b.points[ib], p)
        elif ia is not None:
            total += diagonal_gap(a.points[ia]) ** p
        elif ib is not None:
            total += diagonal_gap(b.points[ib]) ** p
    return total


def wasserstein_pp(
    a: PersistenceDiagram, b: PersistenceDiagram, p: float = 2.0
) -> tuple[float, DiagramMatching]:
    """Minimum cost W_p^p between two diagrams plus the realizing matching.

    Unmatched points pay their diagonal gap to the power p. Solved exactly as
    an assignment problem; forbidden slot combinations carry infinite cost.
    """
    if a.degree != b.degree:
        raise ParameterError(
            f"cannot match diagrams of degrees {a.degree} and {b.degree}"
        )
    if p < 1:
        raise ParameterError("Wasserstein order p must be >= 1")
    m, n = len(a.points), len(b.points)
    if m == 0 and n == 0:
        return 0.0, DiagramMatching((), 0.0, p)

    cost = np.full((m + n, m + n), np.inf)
    for i, pa in enumerate(a.points):
        for j, pb in enumerate(b.points):
            cost[i, j] = _pair_cost(pa, pb, p)
    for i, pa in enumerate(a.points):
        cost[i, n + i] = diagonal_gap(pa) ** p
    for j, pb in enumerate(b.points):
        cost[m + j, j] = diagonal_gap(pb) ** p
    cost[m:, n:] = 0.0

    rows, cols = linear_sum_assignment(cost)
    pairs = []
    for r, c in zip(rows, cols):
        ia = int(r) if r < m else None
        ib = int(c) if c < n else None
        if ia is None and ib is None:
            continue
        pairs.append((ia, ib))
    pairs = tuple(pairs)
    total = _recompute_cost(a, b, pairs, p)
    return total, DiagramMatching(pairs, total, p)


_ORACLE_MAX_POINTS = 5


def matching_oracle(a: PersistenceDiagram, b: PersistenceDiagram, p: float = 2.0) -> float:
    """Exhaustive minimum over all partial matchings, for test scale only."""
    if a.degree != b.degree:
        raise ParameterError("diagrams must share a degree")
    m, n = len(a.points), len(b.points)
    if m > _ORACLE_MAX_POINTS or n > _ORACLE_MAX_POINTS:
        raise ParameterError(f"matching oracle is capped at {_ORACLE_MAX_POINTS} points")
    gaps_a = [diagonal_gap(pt) ** p for pt in a.points]
    gaps_b = [diagonal_gap(pt) ** p for pt in b.points]
    best = math.inf
    for r in range(min(m, n) + 1):
        for sub_a in combinations(range(m), r):
            for sub_b in permutations(range(n), r):
                matched = sum(
                    _pair_cost(a.points[i], b.points[j], p)
                    for i, j in zip(sub_a, sub_b)
                )
                unmatched = sum(gaps_a[i] for i in range(m) if i not in sub_a)
                unmatched += sum(gaps_b[j] for j in range(n) if j not in sub_b)
                best = min(best, matched + unmatched)
    return 0.0 if best == math.inf else best


def matching_subgradient(
    a_target: PersistenceDiagram,
    b_var: PersistenceDiagram,
    match: DiagramMatching,
    p: float = 2.0,
) -> np.ndarray:
    """Gradient of the matching cost w.r.t. the (birth, death) coordinates of b_var.

    The target diagram is fixed, so only points of b_var receive gradients:
    a point matched to target point a gets p * ||b - a||^(p-2) * (b - a), and
    a point matched to the diagonal gets the same with a replaced by the
    diagonal projection. Returns a (len(b_var), 2) array.
    """
    recomputed = _recompute_cost(a_target, b_var, match.pairs, p)
    if abs(recomputed - match.cost) > 1e-9:
        raise MatchingConsistencyError(
            f"matching cost {match.cost} disagrees with diagrams ({recomputed})"
        )
    grads = np.zeros((len(b_var.points), 2))
    for ia, ib in match.pairs:
        if ib is None:
            continue
        pb = b_var.points[ib]
        if ia is None:
            mid = 0.5 * (pb.birth + pb.death)
            diff = np.array([pb.birth - mid, pb.death - mid])
        else:
            pa = a_target.points[ia]
            diff = np.array([pb.birth - pa.birth, pb.death - pa.death])
        norm = float(np.hypot(diff[0], diff[1]))
        if norm == 0.0:
            continue
        grads[ib] = p * norm ** (p - 2.0) * diff
    return grads
