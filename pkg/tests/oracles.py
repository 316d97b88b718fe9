"""Slow, independent reference implementations used only by the tests."""

import itertools

import numpy as np


def lattice_by_recursion(m, H):
    """All compositions of H into m non-negative parts, divided by H."""
    def rec(parts_left, total):
        if parts_left == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in rec(parts_left - 1, total - first):
                yield (first,) + rest
    return np.array(sorted(rec(m, H)), dtype=float) / H


def brute_dominates(a, b, cva=0.0, cvb=0.0):
    if cva <= 0 and cvb > 0:
        return True
    if cva > 0 and cvb <= 0:
        return False
    if cva > 0 and cvb > 0:
        return cva < cvb
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def brute_fronts(F, CV=None):
    """Peel non-dominated layers with an O(n^2 m) pairwise scan per layer."""
    n = len(F)
    CV = np.zeros(n) if CV is None else CV
    remaining = list(range(n))
    fronts = []
    while remaining:
        front = [i for i in remaining
                 if not any(brute_dominates(F[j], F[i], CV[j], CV[i]) for j in remaining if j != i)]
        fronts.append(sorted(front))
        remaining = [i for i in remaining if i not in front]
    return fronts


def point_to_ray(f, w):
    """Distance from f to the line through the origin along w, via the projection formula."""
    f, w = np.asarray(f, float), np.asarray(w, float)
    t = f.dot(w) / w.dot(w)
    return float(np.linalg.norm(f - t * w))


def hv_grid(P, z_ref, cells=400):
    """Dominated volume counted on a regular grid of cell centres."""
    P = np.atleast_2d(np.asarray(P, float))
    m = P.shape[1]
    axes = [(np.arange(cells) + 0.5) / cells * z_ref[k] for k in range(m)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
    covered = np.zeros(len(mesh), dtype=bool)
    for p in P:
        covered |= np.all(mesh >= p, axis=1)
    return covered.mean() * np.prod(z_ref)


def hv_inclusion_exclusion(P, z_ref):
    """Exact union volume by inclusion-exclusion over all subsets (small sets only)."""
    P = [np.asarray(p, float) for p in P if np.all(np.asarray(p) < z_ref)]
    total = 0.0
    for r in range(1, len(P) + 1):
        for subset in itertools.combinations(P, r):
            corner = np.max(subset, axis=0)
            total += (-1) ** (r + 1) * np.prod(np.asarray(z_ref) - corner)
    return total


def permutation_pvalue(a, b):
    """Two-sided exact p of the rank sum over every relabelling of the pooled sample."""
    a, b = list(a), list(b)
    pooled = a + b
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2.0 + 1.0
        i = j + 1
    observed = sum(ranks[: len(a)])
    sums = [sum(ranks[k] for k in c) for c in itertools.combinations(range(len(pooled)), len(a))]
    tol = 1e-9
    lo = sum(s <= observed + tol for s in sums) / len(sums)
    hi = sum(s >= observed - tol for s in sums) / len(sums)
    return min(1.0, 2.0 * min(lo, hi)), observed - len(a) * (len(a) + 1) / 2.0


def permutation_mark(a, b, alpha=0.05, better="lower"):
    if len(set(a) | set(b)) == 1:
        return "≈"
    p, u = permutation_pvalue(a, b)
    if not p < alpha:
        return "≈"
    a_lower = u < len(a) * len(b) / 2.0
    return "+" if a_lower == (better == "lower") else "-"


def wrp_feasible_point(seed=0, tries=200_000):
    """Rejection-sample a decision vector of the water problem with every constraint met."""
    rng = np.random.default_rng(seed)
    lo, hi = np.array([0.01, 0.01, 0.01]), np.array([0.45, 0.10, 0.10])
    X = lo + rng.random((tries, 3)) * (hi - lo)
    x1, x2, x3 = X.T
    x12 = x1 * x2
    g = [
        1 - (0.00139 / x12 + 4.94 * x3 - 0.08),
        1 - (0.000306 / x12 + 1.082 * x3 - 0.0986),
        50000 - (12.307 / x12 + 49408.24 * x3 + 4051.02),
        16000 - (2.098 / x12 + 8046.33 * x3 - 696.71),
        10000 - (2.138 / x12 + 7883.39 * x3 - 705.04),
        2000 - (0.417 * x12 + 1721.26 * x3 - 136.54),
        550 - (0.164 / x12 + 631.13 * x3 - 54.48),
    ]
    ok = np.all(np.array(g) >= 0, axis=0)
    if not ok.any():
        raise RuntimeError("no feasible sample found")
    return X[np.flatnonzero(ok)[0]]
