"""Reference-point geometry for NSGA-III environmental selection.

Das-Dennis lattices on the unit simplex, adaptive normalization of the
objective space, perpendicular-distance association and niche-count based
filling of the last admitted front.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations
from math import comb

import numpy as np

from .core import ConfigurationError

MAX_LATTICE_POINTS = 500_000
INNER_LAYER_SHRINK = 0.5
ASF_OFF_AXIS_WEIGHT = 1e-6
INTERCEPT_FLOOR = 1e-12


@dataclass
class ReferencePointSet:
    points: np.ndarray
    adapted: np.ndarray
    niche_count: np.ndarray
    divisions: int

    def __len__(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return self.points.shape[1]

    @property
    def origin(self) -> list[str]:
        return ["adapted" if a else "lattice" for a in self.adapted]

    @property
    def n_lattice(self) -> int:
        return int(np.count_nonzero(~self.adapted))

    @classmethod
    def from_points(cls, points: np.ndarray, divisions: int) -> "ReferencePointSet":
        points = np.asarray(points, dtype=float)
        n = len(points)
        return cls(points, np.zeros(n, dtype=bool), np.zeros(n, dtype=int), divisions)


def simplex_lattice(m: int, H: int, max_points: int = MAX_LATTICE_POINTS) -> np.ndarray:
    """All points of the unit simplex whose coordinates are multiples of 1/H."""
    if m < 2 or H < 1:
        raise ConfigurationError(f"lattice needs m >= 2 and H >= 1, got m={m}, H={H}")
    count = comb(m + H - 1, H)
    if count > max_points:
        raise ConfigurationError(f"lattice with m={m}, H={H} has {count} points (limit {max_points})")
    # stars and bars: choose m-1 bar positions among H+m-1 slots
    bars = np.array(list(combinations(range(H + m - 1), m - 1)), dtype=int).reshape(count, m - 1)
    edges = np.hstack([np.full((count, 1), -1), bars, np.full((count, 1), H + m - 1)])
    return (np.diff(edges, axis=1) - 1) / H


def das_dennis(m: int, H: int, max_points: int = MAX_LATTICE_POINTS) -> ReferencePointSet:
    return ReferencePointSet.from_points(simplex_lattice(m, H, max_points), H)


def _largest_divisions(m: int, budget: int) -> int:
    H = 0
    while comb(m + H, H + 1) <= budget:
        H += 1
    return H


def build_reference_set(m: int, n_target: int) -> ReferencePointSet:
    """Reference set of at most ``n_target`` points, as close to it as lattices allow.

    One layer when the largest fitting lattice gets within 75% of the target;
    otherwise an outer lattice plus an inner lattice shrunk halfway towards
    the simplex centroid.
    """
    if n_target < m:
        raise ConfigurationError(f"need at least m={m} reference points, got {n_target}")
    H1 = _largest_divisions(m, n_target)
    outer = simplex_lattice(m, H1)
    if len(outer) >= 0.75 * n_target:
        return ReferencePointSet.from_points(outer, H1)
    H2 = _largest_divisions(m, n_target - len(outer))
    if H2 < 1:
        return ReferencePointSet.from_points(outer, H1)
    tau = INNER_LAYER_SHRINK
    inner = tau * simplex_lattice(m, H2) + (1.0 - tau) / m
    points = np.vstack([outer, inner])
    _, first = np.unique(np.round(points, 12), axis=0, return_index=True)
    return ReferencePointSet.from_points(points[np.sort(first)], H1)


@dataclass(frozen=True)
class NormalizationState:
    ideal: np.ndarray
    intercepts: np.ndarray

    @classmethod
    def initial(cls, m: int) -> "NormalizationState":
        return cls(np.full(m, np.inf), np.ones(m))

    def normalize(self, F: np.ndarray) -> np.ndarray:
        return (F - self.ideal) / self.intercepts


def update_normalization(state: NormalizationState, F: np.ndarray) -> NormalizationState:
    """Refresh the ideal point and hyperplane intercepts from objectives ``F``.

    Extreme points minimize an achievement scalarizing function per axis.
    A singular system or a non-positive intercept falls back to the
    population's nadir; intercepts beyond the nadir are clipped to it.
    """
    F = np.asarray(F, dtype=float)
    if len(F) == 0:
        raise ValueError("cannot normalize an empty population")
    m = F.shape[1]
    ideal = np.minimum(state.ideal, F.min(axis=0))
    T = F - ideal
    spread = np.maximum(T.max(axis=0), INTERCEPT_FLOOR)

    weights = np.full((m, m), ASF_OFF_AXIS_WEIGHT)
    np.fill_diagonal(weights, 1.0)
    asf = np.max(T[None, :, :] / weights[:, None, :], axis=2)
    extremes = T[np.argmin(asf, axis=1)]

    intercepts = None
    try:
        with np.errstate(divide="ignore", invalid="ignore"):
            plane = np.linalg.solve(extremes, np.ones(m))
            candidate = 1.0 / plane
        if np.all(np.isfinite(candidate)) and np.all(candidate > INTERCEPT_FLOOR):
            intercepts = np.minimum(candidate, spread)
    except np.linalg.LinAlgError:
        pass
    if intercepts is None:
        intercepts = spread
    return NormalizationState(ideal, intercepts)


def perpendicular_distances(Fn: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Distance of each row of ``Fn`` to each ray through the origin and ``points``."""
    U = points / np.linalg.norm(points, axis=1, keepdims=True)
    proj = Fn @ U.T
    residual = Fn[:, None, :] - proj[:, :, None] * U[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", residual, residual))


def associate(Fn: np.ndarray, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest reference ray per individual (lowest index wins ties)."""
    D = perpendicular_distances(np.atleast_2d(Fn), np.atleast_2d(points))
    index = np.argmin(D, axis=1)
    return index, D[np.arange(len(D)), index]


def niche_counts(index: np.ndarray, n_refs: int) -> np.ndarray:
    return np.bincount(index, minlength=n_refs).astype(int)


def niche_select(ref_index: np.ndarray, distance: np.ndarray, in_last_front: np.ndarray,
                 n_refs: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Admit ``k`` last-front members by niche preservation.

    ``ref_index`` and ``distance`` describe the association of every
    candidate for survival; ``in_last_front`` flags those still competing.
    Niche counts start from the already-admitted members. Returns positions
    of the admitted last-front members in admission order.
    """
    in_last_front = np.asarray(in_last_front, dtype=bool)
    counts = niche_counts(ref_index[~in_last_front], n_refs)
    last = np.flatnonzero(in_last_front)
    if k >= len(last):
        return last

    candidates = [[] for _ in range(n_refs)]
    for pos in last:
        candidates[ref_index[pos]].append(pos)
    active = np.array([len(c) > 0 for c in candidates])

    chosen = []
    while len(chosen) < k:
        live = np.flatnonzero(active)
        pool = live[counts[live] == counts[live].min()]
        j = pool[rng.integers(len(pool))] if len(pool) > 1 else pool[0]
        members = candidates[j]
        if counts[j] == 0:
            pick = min(range(len(members)), key=lambda t: distance[members[t]])
        else:
            pick = int(rng.integers(len(members)))
        chosen.append(members.pop(pick))
        counts[j] += 1
        if not members:
            active[j] = False
    return np.array(chosen, dtype=int)


def with_counts(refs: ReferencePointSet, counts: np.ndarray) -> ReferencePointSet:
    return replace(refs, niche_count=np.asarray(counts, dtype=int))
