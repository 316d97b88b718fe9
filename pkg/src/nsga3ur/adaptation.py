"""Update-when-required trigger and reference-point inclusion/exclusion.

The trigger measures how widely the normalized population is spread
(the spreading index), compares it once against a cubic threshold in the
number of objectives, and switches reference adaptation on for the rest
of the run when the front looks irregular.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum
from math import floor
from typing import Optional

import numpy as np

from .refgeom import NormalizationState, ReferencePointSet, associate, niche_counts

THRESHOLD_COEFFICIENTS = (-0.00001989, 0.0002034, 0.03376, -0.2373)
DUPLICATE_TOL = 1e-12
SIMPLEX_TOL = 1e-12


class Mode(IntEnum):
    STATIC = 0
    ADAPTIVE = 1


def spreading_index(Fn: np.ndarray, h: float = 4.0, scaling: str = "literal") -> float:
    """Root of the summed squared normalized objectives, divided by ``h``.

    ``scaling="rms"`` averages the squared norms over the population before
    taking the root, which removes the dependence on population size.
    """
    Fn = np.atleast_2d(np.asarray(Fn, dtype=float))
    if Fn.size == 0:
        raise ValueError("spreading index of an empty population is undefined")
    if h <= 0:
        raise ValueError("h must be positive")
    total = float(np.sum(Fn * Fn))
    if scaling == "rms":
        total /= len(Fn)
    elif scaling != "literal":
        raise ValueError(f"unknown scaling {scaling!r}")
    return float(np.sqrt(total) / h)


def regularity_threshold(m: float) -> float:
    a, b, c, d = THRESHOLD_COEFFICIENTS
    return a * m**3 + b * m**2 + c * m + d


@dataclass(frozen=True)
class UrState:
    mode: Mode = Mode.STATIC
    start_fraction: float = 0.2
    h: float = 4.0
    scaling: str = "literal"
    forced: Optional[Mode] = None
    decided: bool = False
    generation: Optional[int] = None
    si: Optional[float] = None
    threshold: Optional[float] = None

    def trigger_generation(self, gen_max: int) -> int:
        return floor(self.start_fraction * gen_max)


def ur_decide(state: UrState, gen: int, gen_max: int, F: np.ndarray, norm: NormalizationState) -> UrState:
    """Evaluate the regularity test if ``gen`` is the trigger generation.

    Adaptation is enabled only when the spreading index strictly exceeds
    the threshold. Outside the trigger generation, or once decided, the
    state is returned untouched.
    """
    if state.decided or gen != state.trigger_generation(gen_max):
        return state
    Fn = norm.normalize(np.asarray(F, dtype=float))
    si = spreading_index(Fn, state.h, state.scaling)
    threshold = regularity_threshold(Fn.shape[1])
    mode = Mode.ADAPTIVE if si > threshold else Mode.STATIC
    if state.forced is not None:
        mode = state.forced
    return replace(state, mode=mode, decided=True, generation=gen, si=si, threshold=threshold)


def _first_unique(candidates: np.ndarray, existing: np.ndarray) -> np.ndarray:
    """Mask of candidates matching neither an existing point nor an earlier candidate."""
    close_existing = np.all(np.abs(candidates[:, None, :] - existing[None, :, :]) <= DUPLICATE_TOL, axis=2)
    close_self = np.all(np.abs(candidates[:, None, :] - candidates[None, :, :]) <= DUPLICATE_TOL, axis=2)
    earlier = np.tril(close_self, k=-1).any(axis=1)
    return ~close_existing.any(axis=1) & ~earlier


def include_reference_points(refs: ReferencePointSet) -> ReferencePointSet:
    """Surround every crowded reference point with a local simplex of m new points.

    Candidates keep the crowded point as their centroid and sit one
    lattice spacing apart; those leaving the simplex or duplicating an
    existing point are dropped.
    """
    crowded = np.flatnonzero(refs.niche_count >= 2)
    if len(crowded) == 0:
        return refs
    m = refs.m
    offsets = (np.eye(m) - 1.0 / m) / refs.divisions
    candidates = (refs.points[crowded][:, None, :] + offsets[None, :, :]).reshape(-1, m)
    candidates = candidates[np.all(candidates >= -SIMPLEX_TOL, axis=1)]
    candidates = np.clip(candidates, 0.0, None)
    candidates /= candidates.sum(axis=1, keepdims=True)
    new = candidates[_first_unique(candidates, refs.points)]
    if len(new) == 0:
        return refs
    return ReferencePointSet(
        np.vstack([refs.points, new]),
        np.concatenate([refs.adapted, np.ones(len(new), dtype=bool)]),
        np.concatenate([refs.niche_count, np.zeros(len(new), dtype=int)]),
        refs.divisions,
    )


def exclude_reference_points(refs: ReferencePointSet) -> ReferencePointSet:
    """Drop adapted points that no individual is associated with.

    Lattice points are never removed, so the uniform structure survives.
    """
    keep = ~refs.adapted | (refs.niche_count > 0)
    if keep.all():
        return refs
    return ReferencePointSet(refs.points[keep], refs.adapted[keep], refs.niche_count[keep], refs.divisions)


def adapt_reference_points(refs: ReferencePointSet, Fn: np.ndarray) -> ReferencePointSet:
    """One adaptation step for a selected population with normalized objectives ``Fn``."""
    index, _ = associate(Fn, refs.points)
    refs = replace(refs, niche_count=niche_counts(index, len(refs)))
    grown = include_reference_points(refs)
    if len(grown) != len(refs):
        index, _ = associate(Fn, grown.points)
        grown = replace(grown, niche_count=niche_counts(index, len(grown)))
    return exclude_reference_points(grown)
