"""Quality indicators and the rank-sum significance test.

Hypervolume is reported in a scaled objective space: objectives are mapped
so the problem's best bound sits at the origin and a reference point 10%
beyond its worst bound sits at (1, ..., 1). Scaled values never exceed 1.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy import stats
from scipy.spatial.distance import cdist

from .problems import ProblemDefinition

MC_SAMPLES = 1_000_000
EXACT_HV_MAX_M = 4
REFERENCE_MARGIN = 1.1
EXACT_RANK_MAX = 8


def igd(P: np.ndarray, Pstar: np.ndarray) -> float:
    """Mean distance from each reference-front point to its nearest solution."""
    P, Pstar = np.atleast_2d(P), np.atleast_2d(Pstar)
    if P.size == 0 or Pstar.size == 0:
        raise ValueError("IGD needs non-empty solution and reference sets")
    if P.shape[1] != Pstar.shape[1]:
        raise ValueError(f"dimension mismatch: solutions have {P.shape[1]} objectives, reference {Pstar.shape[1]}")
    return float(cdist(Pstar, P).min(axis=1).mean())


def _hv_staircase(P: np.ndarray, ref: np.ndarray) -> float:
    """Two-objective dominated area."""
    P = P[np.lexsort((P[:, 1], P[:, 0]))]
    ys = np.minimum.accumulate(P[:, 1])
    keep = np.concatenate([[True], ys[1:] < ys[:-1]])
    xs, ys = P[keep, 0], ys[keep]
    widths = np.diff(np.append(xs, ref[0]))
    return float(np.sum(widths * (ref[1] - ys)))


def _hv_slice(P: np.ndarray, ref: np.ndarray) -> float:
    m = P.shape[1]
    if len(P) == 0:
        return 0.0
    if m == 1:
        return float(ref[0] - P[:, 0].min())
    if m == 2:
        return _hv_staircase(P, ref)
    P = P[np.argsort(P[:, -1], kind="stable")]
    depths = np.diff(np.append(P[:, -1], ref[-1]))
    volume = 0.0
    for i in range(len(P)):
        if depths[i] > 0:
            volume += depths[i] * _hv_slice(P[: i + 1, :-1], ref[:-1])
    return volume


def hv_exact(P: np.ndarray, z_ref: np.ndarray) -> float:
    """Exact dominated volume bounded by ``z_ref`` via dimension-sweep slicing.

    Points that do not strictly dominate ``z_ref`` add no volume and are
    dropped first.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    z_ref = np.asarray(z_ref, dtype=float)
    if P.size == 0:
        return 0.0
    P = P[np.all(P < z_ref, axis=1)]
    return _hv_slice(P, z_ref)


def hv_monte_carlo(P: np.ndarray, z_ref: np.ndarray, n_samples: int = MC_SAMPLES,
                   rng: Optional[np.random.Generator] = None, chunk: int = 50_000) -> float:
    """Dominated volume estimated by uniform sampling of the box [min(P), z_ref]."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    z_ref = np.asarray(z_ref, dtype=float)
    if P.size == 0:
        return 0.0
    P = P[np.all(P < z_ref, axis=1)]
    if len(P) == 0:
        return 0.0
    rng = rng if rng is not None else np.random.default_rng(0)
    lower = P.min(axis=0)
    box = float(np.prod(z_ref - lower))
    hits = 0
    done = 0
    while done < n_samples:
        k = min(chunk, n_samples - done)
        S = lower + rng.random((k, len(z_ref))) * (z_ref - lower)
        covered = np.zeros(k, dtype=bool)
        for p in P:
            covered |= np.all(S >= p, axis=1)
        hits += int(covered.sum())
        done += k
    return box * hits / n_samples


def hv_reference_point(problem: ProblemDefinition) -> Optional[np.ndarray]:
    bounds = problem.hv_bounds()
    if bounds is None:
        return None
    best, worst = bounds
    return best + REFERENCE_MARGIN * (worst - best)


def scale_objectives(F: np.ndarray, problem: ProblemDefinition) -> Optional[np.ndarray]:
    """Map objectives so the problem's best bound is 0 and the HV reference point is 1."""
    bounds = problem.hv_bounds()
    if bounds is None:
        return None
    best = bounds[0]
    return (np.asarray(F, dtype=float) - best) / (hv_reference_point(problem) - best)


def hypervolume(F: np.ndarray, problem: ProblemDefinition, rng: Optional[np.random.Generator] = None,
                n_samples: int = MC_SAMPLES) -> float:
    """Scaled hypervolume; exact up to four objectives, Monte Carlo beyond. NaN without bounds."""
    T = scale_objectives(F, problem)
    if T is None:
        return float("nan")
    ones = np.ones(T.shape[1])
    if T.shape[1] <= EXACT_HV_MAX_M:
        return hv_exact(T, ones)
    return hv_monte_carlo(T, ones, n_samples, rng)


def _u_statistic(a: np.ndarray, b: np.ndarray, axis: int = -1) -> np.ndarray:
    ranks = stats.rankdata(np.concatenate([a, b], axis=axis), axis=axis)
    n_a = a.shape[axis]
    return np.take(ranks, np.arange(n_a), axis=axis).sum(axis=axis) - n_a * (n_a + 1) / 2.0


def rank_sum_pvalue(sample_a, sample_b) -> tuple[float, float]:
    """Two-sided p-value and U statistic of ``sample_a``.

    Samples of at most eight values use the full permutation distribution
    of U with mid-ranks, so ties are handled exactly. Larger samples use
    the tie-corrected normal approximation with continuity correction.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if min(len(a), len(b)) == 1:
        # a single observation can only move between the pooled positions
        ranks = stats.rankdata(np.concatenate([a, b]))
        rank_sums = ranks if len(a) == 1 else ranks.sum() - ranks
        observed = ranks[: len(a)].sum()
        u = observed - len(a) * (len(a) + 1) / 2.0
        tol = 1e-9 * max(1.0, abs(observed))
        lower = np.mean(rank_sums <= observed + tol)
        upper = np.mean(rank_sums >= observed - tol)
        return float(min(1.0, 2.0 * min(lower, upper))), float(u)
    if len(a) <= EXACT_RANK_MAX and len(b) <= EXACT_RANK_MAX:
        res = stats.permutation_test((a, b), _u_statistic, permutation_type="independent",
                                     alternative="two-sided", n_resamples=np.inf, vectorized=True)
        return float(res.pvalue), float(res.statistic)
    res = stats.mannwhitneyu(a, b, alternative="two-sided", use_continuity=True, method="asymptotic")
    return float(res.pvalue), float(res.statistic)


def mann_whitney(sample_a, sample_b, alpha: float = 0.05, better: str = "lower") -> str:
    """Two-sided rank-sum comparison of ``sample_a`` against ``sample_b``.

    Returns ``"+"`` when ``sample_a`` is significantly better, ``"-"`` when
    significantly worse and ``"≈"`` otherwise.
    """
    if better not in ("lower", "higher"):
        raise ValueError("better must be 'lower' or 'higher'")
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("samples must be non-empty")
    pooled = np.concatenate([a, b])
    if np.all(pooled == pooled[0]):
        return "≈"
    pvalue, u = rank_sum_pvalue(a, b)
    if not pvalue < alpha:
        return "≈"
    # U counts pairs where a exceeds b, so a small U means a tends to be lower
    a_lower = u < len(a) * len(b) / 2.0
    return "+" if a_lower == (better == "lower") else "-"
