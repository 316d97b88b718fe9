"""Benchmark and real-world problems with true-front samplers.

Every problem is stated for minimization. The knapsack problem negates
profits at the boundary; reports undo the sign through ``maximize``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np

from .core import ConfigurationError
from .refgeom import build_reference_set

DEFAULT_FRONT_SIZE = 10_000
DEFAULT_MOKP_SEED = 2024
WRP_FRONT_ENV = "NSGA3UR_WRP_FRONT"
WRP_FRONT_FILE = Path(__file__).parent / "data" / "wrp_reference_front.txt"

REGULAR_SHAPES = ("linear", "concave")
IRREGULAR_SHAPES = ("degenerate", "disconnected", "inverted")


def shape_category(shape: str) -> str:
    """Regularity class of a front-shape tag."""
    if shape in REGULAR_SHAPES:
        return "regular"
    if shape in IRREGULAR_SHAPES:
        return "irregular"
    return "real-world"


class ReferenceFrontError(FileNotFoundError):
    pass


class ProblemDefinition:
    """Base problem: box-bounded reals unless ``encoding == "binary"``."""

    name = "problem"
    shape = "real-world"
    encoding = "real"
    maximize = False
    has_constraints = False

    def __init__(self, m: int, d: int, lower=0.0, upper=1.0):
        self.m = int(m)
        self.d = int(d)
        self.lower = np.broadcast_to(np.asarray(lower, dtype=float), (self.d,)).copy()
        self.upper = np.broadcast_to(np.asarray(upper, dtype=float), (self.d,)).copy()

    def __repr__(self) -> str:
        return f"{type(self).__name__}(m={self.m}, d={self.d})"

    @property
    def category(self) -> str:
        return shape_category(self.shape)

    def objectives(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def violation(self, X: np.ndarray) -> np.ndarray:
        return np.zeros(len(X))

    def repair(self, X: np.ndarray) -> np.ndarray:
        return X

    def evaluate_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        X = self.repair(np.atleast_2d(X))
        return X, self.objectives(X), self.violation(X)

    def random_decisions(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.lower + rng.random((n, self.d)) * (self.upper - self.lower)

    def true_front(self, n: int = DEFAULT_FRONT_SIZE) -> Optional[np.ndarray]:
        return None

    def hv_bounds(self) -> Optional[tuple[np.ndarray, np.ndarray]]:
        """Objective-space box (best, worst) used to scale hypervolume."""
        front = cached_front(self)
        if front is None:
            return None
        return np.zeros(self.m), front.max(axis=0)


# --- DTLZ family -----------------------------------------------------------

def _multimodal_g(tail: np.ndarray) -> np.ndarray:
    k = tail.shape[1]
    z = tail - 0.5
    return 100.0 * (k + np.sum(z * z - np.cos(20.0 * np.pi * z), axis=1))


def _sphere_g(tail: np.ndarray) -> np.ndarray:
    z = tail - 0.5
    return np.sum(z * z, axis=1)


def _linear_shape(head: np.ndarray, m: int) -> np.ndarray:
    n = len(head)
    F = np.ones((n, m))
    for i in range(m):
        F[:, i] = np.prod(head[:, : m - 1 - i], axis=1)
        if i > 0:
            F[:, i] *= 1.0 - head[:, m - 1 - i]
    return 0.5 * F


def _spherical_shape(theta: np.ndarray, m: int) -> np.ndarray:
    cos, sin = np.cos(theta), np.sin(theta)
    n = len(theta)
    F = np.ones((n, m))
    for i in range(m):
        F[:, i] = np.prod(cos[:, : m - 1 - i], axis=1)
        if i > 0:
            F[:, i] *= sin[:, m - 1 - i]
    return F


def dtlz_evaluate(k: int, m: int, X: np.ndarray) -> np.ndarray:
    """Objectives of DTLZ``k`` for each row of ``X`` (rows or a single vector)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    head, tail = X[:, : m - 1], X[:, m - 1:]
    if k == 1:
        g = _multimodal_g(tail)
        return (1.0 + g)[:, None] * _linear_shape(head, m)
    if k in (2, 3, 4):
        g = _sphere_g(tail) if k != 3 else _multimodal_g(tail)
        angles = head**100 if k == 4 else head
        return (1.0 + g)[:, None] * _spherical_shape(angles * np.pi / 2.0, m)
    if k in (5, 6):
        g = _sphere_g(tail) if k == 5 else np.sum(tail**0.1, axis=1)
        theta = np.empty_like(head)
        theta[:, 0] = head[:, 0] * np.pi / 2.0
        if m > 2:
            gg = g[:, None]
            theta[:, 1:] = np.pi / (4.0 * (1.0 + gg)) * (1.0 + 2.0 * gg * head[:, 1:])
        return (1.0 + g)[:, None] * _spherical_shape(theta, m)
    if k == 7:
        g = 1.0 + 9.0 / tail.shape[1] * np.sum(tail, axis=1)
        F = np.empty((len(X), m))
        F[:, : m - 1] = head
        h = m - np.sum(head / (1.0 + g)[:, None] * (1.0 + np.sin(3.0 * np.pi * head)), axis=1)
        F[:, m - 1] = (1.0 + g) * h
        return F
    raise ConfigurationError(f"DTLZ{k} is not supported")


def idtlz_evaluate(k: int, m: int, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    tail = X[:, m - 1:]
    if k == 1:
        g = _multimodal_g(tail)
        return 0.5 * (1.0 + g)[:, None] - dtlz_evaluate(1, m, X)
    if k == 2:
        g = _sphere_g(tail)
        return (1.0 + g)[:, None] - dtlz_evaluate(2, m, X)
    raise ConfigurationError(f"IDTLZ{k} is not supported")


# (n_distance_variables, front shape) per DTLZ index
_DTLZ_LAYOUT = {1: (5, "linear"), 2: (10, "concave"), 3: (10, "concave"), 4: (10, "concave"),
                5: (10, "degenerate"), 6: (10, "degenerate"), 7: (20, "disconnected")}
_IDTLZ_LAYOUT = {1: (5, "inverted"), 2: (10, "inverted")}


def _simplex_sample(m: int, n: int) -> np.ndarray:
    return build_reference_set(m, n).points


def _degenerate_curve(m: int, n: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)
    R = np.column_stack([t, 1.0 - t])
    R /= np.linalg.norm(R, axis=1, keepdims=True)
    R = np.hstack([np.repeat(R[:, :1], m - 2, axis=1), R])
    exponents = np.array([m - 2] + list(range(m - 2, -1, -1)), dtype=float)
    return R / np.sqrt(2.0) ** exponents


def dtlz7_front_axis(n_grid: int = 200_001) -> np.ndarray:
    """Non-dominated values of one position variable on the DTLZ7 front.

    The last objective is separable in the position variables, so a point
    of the front is non-dominated exactly when each coordinate is
    non-dominated for the pair (x, -x(1 + sin(3 pi x))). The filter runs on
    a dense one-dimensional grid.
    """
    x = np.linspace(0.0, 1.0, n_grid)
    cost = -x * (1.0 + np.sin(3.0 * np.pi * x))
    # x is sorted ascending, so a value survives when its cost beats every smaller x
    best_before = np.minimum.accumulate(np.concatenate([[np.inf], cost[:-1]]))
    return x[cost < best_before]


def _dtlz7_front(m: int, n: int) -> np.ndarray:
    axis = dtlz7_front_axis()
    per_axis = int(np.ceil(n ** (1.0 / (m - 1))))
    while per_axis ** (m - 1) < n:
        per_axis += 1
    values = axis[np.round(np.linspace(0, len(axis) - 1, per_axis)).astype(int)]
    grid = np.stack(np.meshgrid(*([values] * (m - 1)), indexing="ij"), axis=-1).reshape(-1, m - 1)
    if len(grid) > n:
        grid = grid[np.round(np.linspace(0, len(grid) - 1, n)).astype(int)]
    last = 2.0 * (m - np.sum(grid / 2.0 * (1.0 + np.sin(3.0 * np.pi * grid)), axis=1))
    return np.column_stack([grid, last])


class DTLZ(ProblemDefinition):
    def __init__(self, k: int, m: int):
        if k not in _DTLZ_LAYOUT:
            raise ConfigurationError(f"DTLZ{k} is not supported")
        n_tail, self.shape = _DTLZ_LAYOUT[k]
        self.k = k
        self.name = f"DTLZ{k}"
        super().__init__(m, m - 1 + n_tail)

    def objectives(self, X):
        return dtlz_evaluate(self.k, self.m, X)

    def true_front(self, n: int = DEFAULT_FRONT_SIZE) -> np.ndarray:
        m = self.m
        if self.k == 1:
            return 0.5 * _simplex_sample(m, n)
        if self.k in (2, 3, 4):
            W = _simplex_sample(m, n)
            return W / np.linalg.norm(W, axis=1, keepdims=True)
        if self.k in (5, 6):
            return _degenerate_curve(m, n)
        return _dtlz7_front(m, n)


class IDTLZ(ProblemDefinition):
    shape = "inverted"

    def __init__(self, k: int, m: int):
        if k not in _IDTLZ_LAYOUT:
            raise ConfigurationError(f"IDTLZ{k} is not supported")
        n_tail, _ = _IDTLZ_LAYOUT[k]
        self.k = k
        self.name = f"IDTLZ{k}"
        super().__init__(m, m - 1 + n_tail)

    def objectives(self, X):
        return idtlz_evaluate(self.k, self.m, X)

    def true_front(self, n: int = DEFAULT_FRONT_SIZE) -> np.ndarray:
        W = _simplex_sample(self.m, n)
        if self.k == 1:
            return (1.0 - W) / 2.0
        return 1.0 - W / np.linalg.norm(W, axis=1, keepdims=True)


# --- multi-objective 0/1 knapsack --------------------------------------------

@dataclass(frozen=True)
class KnapsackInstance:
    profits: np.ndarray
    weights: np.ndarray
    capacities: np.ndarray
    seed: int

    @property
    def m(self) -> int:
        return self.profits.shape[0]

    @property
    def d(self) -> int:
        return self.profits.shape[1]

    @property
    def removal_order(self) -> np.ndarray:
        # least profitable items (by best profit/weight ratio) go first
        return np.argsort(np.max(self.profits / self.weights, axis=0), kind="stable")


def mokp_generate(m: int, d: int = 250, seed: int = DEFAULT_MOKP_SEED) -> KnapsackInstance:
    rng = np.random.default_rng(seed)
    profits = rng.integers(10, 101, size=(m, d))
    weights = rng.integers(10, 101, size=(m, d))
    capacities = 0.5 * weights.sum(axis=1)
    return KnapsackInstance(profits, weights, capacities, seed)


def mokp_repair(instance: KnapsackInstance, bits: np.ndarray) -> np.ndarray:
    """Greedily drop items until every knapsack capacity holds."""
    B = np.atleast_2d(np.asarray(bits, dtype=bool)).copy()
    order = instance.removal_order
    W = instance.weights
    load = B.astype(float) @ W.T
    for r in np.flatnonzero(np.any(load > instance.capacities, axis=1)):
        chosen = order[B[r, order]]
        freed = np.cumsum(W[:, chosen], axis=1)
        ok = np.all(load[r][:, None] - freed <= instance.capacities[:, None], axis=0)
        n_drop = int(np.argmax(ok)) + 1
        B[r, chosen[:n_drop]] = False
    return B


def mokp_evaluate(instance: KnapsackInstance, bits: np.ndarray) -> np.ndarray:
    """Negated profit per knapsack of the repaired selection."""
    B = mokp_repair(instance, bits)
    return -(B.astype(float) @ instance.profits.T)


class Knapsack(ProblemDefinition):
    name = "MOKP"
    encoding = "binary"
    maximize = True

    def __init__(self, m: int, d: int = 250, seed: int = DEFAULT_MOKP_SEED):
        self.instance = mokp_generate(m, d, seed)
        super().__init__(m, d)

    def objectives(self, X):
        return -(np.asarray(X, dtype=float) @ self.instance.profits.T)

    def repair(self, X):
        return mokp_repair(self.instance, X)

    def random_decisions(self, n, rng):
        return rng.random((n, self.d)) < 0.5

    def hv_bounds(self):
        # between selecting every item (unreachable best) and selecting none
        return -self.instance.profits.sum(axis=1).astype(float), np.zeros(self.m)


# --- water resource planning -----------------------------------------------

def wrp_evaluate(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Five objectives and total constraint violation of the water resource planning problem."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    x1, x2, x3 = X[:, 0], X[:, 1], X[:, 2]
    x12 = x1 * x2
    F = np.column_stack([
        106780.37 * (x2 + x3) + 61704.67,
        3000.0 * x1,
        305700.0 * 2289.0 * x2 / (0.06 * 2289.0) ** 0.65,
        250.0 * 2289.0 * np.exp(-39.75 * x2 + 9.9 * x3 + 2.74),
        25.0 * (1.39 / x12 + 4940.0 * x3 - 80.0),
    ])
    # g <= 0 is feasible
    G = np.column_stack([
        0.00139 / x12 + 4.94 * x3 - 0.08 - 1.0,
        0.000306 / x12 + 1.082 * x3 - 0.0986 - 1.0,
        12.307 / x12 + 49408.24 * x3 + 4051.02 - 50000.0,
        2.098 / x12 + 8046.33 * x3 - 696.71 - 16000.0,
        2.138 / x12 + 7883.39 * x3 - 705.04 - 10000.0,
        0.417 * x12 + 1721.26 * x3 - 136.54 - 2000.0,
        0.164 / x12 + 631.13 * x3 - 54.48 - 550.0,
    ])
    return F, np.maximum(G, 0.0).sum(axis=1)


def wrp_front_path() -> Path:
    return Path(os.environ.get(WRP_FRONT_ENV, WRP_FRONT_FILE))


def load_front(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise ReferenceFrontError(f"reference front file not found: {path}")
    return np.atleast_2d(np.loadtxt(path, dtype=float))


def save_front(path, front: np.ndarray):
    np.savetxt(path, np.atleast_2d(front), fmt="%.10g")


class WaterResourcePlanning(ProblemDefinition):
    name = "WRP"
    has_constraints = True

    def __init__(self, m: int = 5):
        if m != 5:
            raise ConfigurationError("WRP has exactly 5 objectives")
        super().__init__(5, 3, lower=[0.01, 0.01, 0.01], upper=[0.45, 0.10, 0.10])

    def objectives(self, X):
        return wrp_evaluate(X)[0]

    def violation(self, X):
        return wrp_evaluate(X)[1]

    def true_front(self, n: int = DEFAULT_FRONT_SIZE) -> np.ndarray:
        return load_front(wrp_front_path())


# --- registry ----------------------------------------------------------------

FIXED_OBJECTIVES = {"WRP": 5}


def problem_names() -> list[str]:
    return [f"DTLZ{k}" for k in _DTLZ_LAYOUT] + [f"IDTLZ{k}" for k in _IDTLZ_LAYOUT] + ["MOKP", "WRP"]


def get_problem(name: str, m: int, **kwargs) -> ProblemDefinition:
    key = name.upper()
    if key.startswith("IDTLZ") and key[5:].isdigit():
        return IDTLZ(int(key[5:]), m)
    if key.startswith("DTLZ") and key[4:].isdigit():
        return DTLZ(int(key[4:]), m)
    if key == "MOKP":
        return Knapsack(m, **kwargs)
    if key == "WRP":
        return WaterResourcePlanning(m)
    raise ConfigurationError(f"unknown problem {name!r}; expected one of {problem_names()}")


def sample_true_front(problem: ProblemDefinition, n: int = DEFAULT_FRONT_SIZE) -> np.ndarray:
    front = problem.true_front(n)
    if front is None:
        raise ReferenceFrontError(f"{problem.name} has no analytic or shipped reference front")
    return front


@lru_cache(maxsize=64)
def _analytic_front(name: str, m: int, n: int) -> np.ndarray:
    return get_problem(name, m).true_front(n)


def cached_front(problem: ProblemDefinition, n: int = DEFAULT_FRONT_SIZE) -> Optional[np.ndarray]:
    """True-front sample shared across runs in one process, or None if unavailable."""
    if isinstance(problem, (DTLZ, IDTLZ)):
        return _analytic_front(problem.name, problem.m, n)
    try:
        # not memoized: a reference file may appear between calls
        return problem.true_front(n)
    except ReferenceFrontError:
        return None
