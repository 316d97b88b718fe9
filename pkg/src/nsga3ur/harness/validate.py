"""Quick self-checks of the library's core laws, runnable without pytest."""

from __future__ import annotations

import itertools
from math import comb
from typing import Callable

import numpy as np
from scipy.stats import rankdata

from ..adaptation import regularity_threshold, spreading_index
from ..algorithms import run
from ..core import RngStream, RunConfig
from ..dominance import fast_nondominated_sort
from ..indicators import hv_exact, hv_monte_carlo, rank_sum_pvalue
from ..problems import get_problem
from ..refgeom import das_dennis


def _lattice_counts() -> str:
    for m in range(2, 7):
        for H in range(1, 9):
            W = das_dennis(m, H).points
            assert len(W) == comb(m + H - 1, H), (m, H)
            assert np.allclose(W.sum(axis=1), 1.0, atol=1e-9) and (W >= 0).all()
    return "m=2..6, H=1..8"


def _brute_fronts(F: np.ndarray) -> list[set]:
    remaining = set(range(len(F)))
    fronts = []
    while remaining:
        front = {i for i in remaining
                 if not any(np.all(F[j] <= F[i]) and np.any(F[j] < F[i]) for j in remaining)}
        fronts.append(front)
        remaining -= front
    return fronts


def _sorting() -> str:
    rng = np.random.default_rng(7)
    for _ in range(25):
        F = rng.integers(0, 5, size=(rng.integers(1, 30), rng.integers(2, 5))).astype(float)
        got = [set(f.tolist()) for f in fast_nondominated_sort(F)]
        assert got == _brute_fronts(F)
    return "25 random instances"


def _hypervolume() -> str:
    assert abs(hv_exact([[0.5, 0.5]], [1, 1]) - 0.25) < 1e-12
    assert abs(hv_exact([[0.25, 0.75], [0.5, 0.5], [0.75, 0.25]], [1, 1]) - 0.375) < 1e-12
    rng = np.random.default_rng(3)
    P = rng.random((15, 3))
    n = 200_000
    exact = hv_exact(P, np.ones(3))
    estimate = hv_monte_carlo(P, np.ones(3), n, rng)
    box = np.prod(1 - P.min(axis=0))
    se = box * np.sqrt((exact / box) * (1 - exact / box) / n)
    assert abs(estimate - exact) <= 3 * se, (exact, estimate)
    return f"exact {exact:.4f}, sampled {estimate:.4f}"


def _threshold() -> str:
    assert abs(regularity_threshold(3) + 0.13472643) < 1e-9
    assert abs(regularity_threshold(5) + 0.06590125) < 1e-9
    return "m=3 and m=5 values"


def _spreading_index() -> str:
    rng = np.random.default_rng(5)
    F = rng.random((20, 3))
    si = spreading_index(F, 4.0)
    assert abs(spreading_index(2.5 * F, 4.0) - 2.5 * si) < 1e-12
    assert abs(spreading_index(F, 2.0) - 2.0 * si) < 1e-12
    return "homogeneity and divisor"


def _rank_sum() -> str:
    a, b = np.array([1.0, 2.0, 2.0, 5.0]), np.array([3.0, 4.0, 6.0, 7.0])
    r = rankdata(np.concatenate([a, b]))
    observed = r[:4].sum()
    sums = np.array([r[list(c)].sum() for c in itertools.combinations(range(8), 4)])
    oracle = min(1.0, 2 * min(np.mean(sums <= observed), np.mean(sums >= observed)))
    got, _ = rank_sum_pvalue(a, b)
    assert abs(got - oracle) < 1e-12, (got, oracle)
    return f"p={got:.4f}"


def _static_equivalence() -> str:
    problem = get_problem("DTLZ2", 3)
    base = dict(problem="DTLZ2", m=3, pop_size=40, max_evaluations=1200, seed=11)
    a = run(problem, RunConfig(algorithm="nsga3", **base), RngStream(11))
    b = run(problem, RunConfig(algorithm="nsga3-ur", force_mode="static", **base), RngStream(11))
    assert np.array_equal(a.population.X, b.population.X)
    return "forced-static run matches NSGA-III"


CHECKS: dict[str, Callable[[], str]] = {
    "lattice-count": _lattice_counts,
    "nondominated-sort": _sorting,
    "hypervolume": _hypervolume,
    "threshold": _threshold,
    "spreading-index": _spreading_index,
    "rank-sum": _rank_sum,
    "static-equivalence": _static_equivalence,
}


def run_checks(echo: Callable[[str], None] = print) -> bool:
    ok = True
    for name, check in CHECKS.items():
        try:
            detail = check()
            echo(f"PASS {name}: {detail}")
        except Exception as exc:  # report every failing check, not just the first
            ok = False
            echo(f"FAIL {name}: {exc!r}")
    return ok
