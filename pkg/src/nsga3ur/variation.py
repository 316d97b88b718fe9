"""Mating selection and genetic operators.

Real-coded problems use simulated binary crossover with bounded polynomial
mutation; binary problems use one-point crossover with bit-flip mutation.
All operators work on whole matrices, one row per parent or child.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .dominance import pairwise_dominates


def tournament_select(F: np.ndarray, CV: Optional[np.ndarray], rng: np.random.Generator,
                      pool_size: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Two pools of parent indices filled by binary tournaments.

    The dominating contestant wins; incomparable pairs are settled by a
    fair coin.
    """
    n = len(F)
    if n < 2:
        raise ValueError("tournament selection needs at least two individuals")
    size = n if pool_size is None else pool_size
    a = rng.integers(n, size=2 * size)
    b = rng.integers(n - 1, size=2 * size)
    b = b + (b >= a)
    coin = rng.random(2 * size) < 0.5
    cva, cvb = (None, None) if CV is None else (CV[a], CV[b])
    a_wins = pairwise_dominates(F[a], F[b], cva, cvb)
    b_wins = pairwise_dominates(F[b], F[a], cvb, cva)
    winner = np.where(a_wins, a, np.where(b_wins, b, np.where(coin, a, b)))
    return winner[:size], winner[size:]


def sbx_crossover(P1: np.ndarray, P2: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                  rng: np.random.Generator, eta_c: float = 20.0, p_c: float = 1.0,
                  clip: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover on paired rows of ``P1`` and ``P2``.

    Each variable takes part with probability 0.5 and the two children swap
    roles with probability 0.5. A pair skips crossover entirely with
    probability ``1 - p_c``.
    """
    P1 = np.atleast_2d(np.asarray(P1, dtype=float))
    P2 = np.atleast_2d(np.asarray(P2, dtype=float))
    n, d = P1.shape
    mu = rng.random((n, d))
    beta = np.where(mu <= 0.5,
                    (2.0 * mu) ** (1.0 / (eta_c + 1.0)),
                    (2.0 - 2.0 * mu) ** (-1.0 / (eta_c + 1.0)))
    beta = beta * np.where(rng.random((n, d)) < 0.5, -1.0, 1.0)
    untouched = rng.random((n, d)) < 0.5
    untouched[rng.random(n) > p_c, :] = True
    mean = (P1 + P2) / 2.0
    half = beta * (P1 - P2) / 2.0
    # untouched genes are copied exactly rather than recomputed
    C1 = np.where(untouched, P1, mean + half)
    C2 = np.where(untouched, P2, mean - half)
    if clip:
        C1 = np.clip(C1, lower, upper)
        C2 = np.clip(C2, lower, upper)
    return C1, C2


def polynomial_mutation(X: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                        rng: np.random.Generator, eta_m: float = 20.0,
                        p_m: Optional[float] = None) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, d = X.shape
    p = 1.0 / d if p_m is None else p_m
    lower = np.broadcast_to(lower, (n, d))
    upper = np.broadcast_to(upper, (n, d))
    span = upper - lower
    site = rng.random((n, d)) < p
    mu = rng.random((n, d))
    Y = np.clip(X, lower, upper)
    power = 1.0 / (eta_m + 1.0)

    down = site & (mu <= 0.5)
    if down.any():
        x, lo, sp, u = Y[down], lower[down], span[down], mu[down]
        delta = (2.0 * u + (1.0 - 2.0 * u) * (1.0 - (x - lo) / sp) ** (eta_m + 1.0)) ** power - 1.0
        Y[down] = x + sp * delta
    up = site & (mu > 0.5)
    if up.any():
        x, hi, sp, u = Y[up], upper[up], span[up], mu[up]
        delta = 1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - (hi - x) / sp) ** (eta_m + 1.0)) ** power
        Y[up] = x + sp * delta
    return np.clip(Y, lower, upper)


def one_point_crossover(B1: np.ndarray, B2: np.ndarray, rng: np.random.Generator,
                        cut: Optional[np.ndarray] = None) -> tuple[np.ndarray, np.ndarray]:
    """Swap suffixes after a cut drawn uniformly from ``1..d-1``."""
    B1 = np.atleast_2d(np.asarray(B1, dtype=bool))
    B2 = np.atleast_2d(np.asarray(B2, dtype=bool))
    n, d = B1.shape
    if d < 2:
        return B1.copy(), B2.copy()
    if cut is None:
        cut = rng.integers(1, d, size=n)
    tail = np.arange(d)[None, :] >= np.asarray(cut).reshape(-1, 1)
    return np.where(tail, B2, B1), np.where(tail, B1, B2)


def bitwise_mutation(B: np.ndarray, rng: np.random.Generator, p_m: Optional[float] = None) -> np.ndarray:
    B = np.atleast_2d(np.asarray(B, dtype=bool))
    p = 1.0 / B.shape[1] if p_m is None else p_m
    return B ^ (rng.random(B.shape) < p)


def make_offspring(X: np.ndarray, pool1: np.ndarray, pool2: np.ndarray, encoding: str,
                   lower, upper, crossover_rng: np.random.Generator,
                   mutation_rng: np.random.Generator, eta_c: float, eta_m: float,
                   p_c: float, p_m: Optional[float]) -> np.ndarray:
    # one child per tournament pair keeps the offspring count equal to the pool size
    if encoding == "binary":
        C, _ = one_point_crossover(X[pool1], X[pool2], crossover_rng)
        skip = crossover_rng.random(len(C)) > p_c
        C[skip] = X[pool1][skip]
        return bitwise_mutation(C, mutation_rng, p_m)
    C, _ = sbx_crossover(X[pool1], X[pool2], lower, upper, crossover_rng, eta_c, p_c)
    return polynomial_mutation(C, lower, upper, mutation_rng, eta_m, p_m)
