"""Pareto dominance, constrained dominance and fast non-dominated sorting."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .core import Individual


def dominates(a: Individual, b: Individual) -> bool:
    """Feasibility-first dominance; plain Pareto dominance when both are feasible."""
    cva, cvb = a.constraint_violation, b.constraint_violation
    if cva <= 0 < cvb:
        return True
    if cvb <= 0 < cva:
        return False
    if cva > 0 and cvb > 0:
        return cva < cvb
    fa, fb = np.asarray(a.objectives), np.asarray(b.objectives)
    return bool(np.all(fa <= fb) and np.any(fa < fb))


def pareto_matrix(F: np.ndarray) -> np.ndarray:
    """``D[i, j]`` is True when row i Pareto-dominates row j."""
    F = np.asarray(F, dtype=float)
    n, m = F.shape
    le = np.ones((n, n), dtype=bool)
    lt = np.zeros((n, n), dtype=bool)
    for k in range(m):
        col = F[:, k]
        le &= col[:, None] <= col[None, :]
        lt |= col[:, None] < col[None, :]
    return le & lt


def pairwise_dominates(Fa: np.ndarray, Fb: np.ndarray, CVa: Optional[np.ndarray] = None,
                       CVb: Optional[np.ndarray] = None) -> np.ndarray:
    """Row-wise constrained dominance of ``Fa[i]`` over ``Fb[i]``."""
    pareto = np.all(Fa <= Fb, axis=1) & np.any(Fa < Fb, axis=1)
    if CVa is None or CVb is None:
        return pareto
    fa, fb = CVa <= 0, CVb <= 0
    return np.where(fa & fb, pareto, (fa & ~fb) | (~fa & ~fb & (CVa < CVb)))


def dominance_matrix(F: np.ndarray, CV: Optional[np.ndarray] = None) -> np.ndarray:
    D = pareto_matrix(F)
    if CV is None:
        return D
    CV = np.asarray(CV, dtype=float)
    infeasible = CV > 0
    if not infeasible.any():
        return D
    feasible = ~infeasible
    both_feasible = feasible[:, None] & feasible[None, :]
    both_infeasible = infeasible[:, None] & infeasible[None, :]
    return np.where(
        both_feasible,
        D,
        (feasible[:, None] & infeasible[None, :]) | (both_infeasible & (CV[:, None] < CV[None, :])),
    )


def fast_nondominated_sort(F: np.ndarray, CV: Optional[np.ndarray] = None,
                           max_count: Optional[int] = None) -> list[np.ndarray]:
    """Partition row indices into fronts, front 0 being non-dominated.

    With ``max_count`` set, sorting stops once the collected fronts hold at
    least that many members.
    """
    D = dominance_matrix(F, CV)
    n = len(D)
    if n == 0:
        return []
    dominated_by = D.sum(axis=0)
    remaining = np.ones(n, dtype=bool)
    fronts = []
    collected = 0
    while remaining.any():
        front = np.flatnonzero(remaining & (dominated_by == 0))
        fronts.append(front)
        collected += len(front)
        if max_count is not None and collected >= max_count:
            break
        remaining[front] = False
        dominated_by = dominated_by - D[front].sum(axis=0)
    return fronts


def nondominated_mask(F: np.ndarray, CV: Optional[np.ndarray] = None) -> np.ndarray:
    D = dominance_matrix(F, CV)
    return ~D.any(axis=0)
