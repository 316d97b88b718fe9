"""Shared domain types, run configuration and the seeded RNG contract."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

if TYPE_CHECKING:
    from .problems import ProblemDefinition

ALGORITHMS = ("nsga3", "a-nsga3", "nsga3-ur")

# Sub-streams are forked from the master seed in this fixed order.
STREAM_NAMES = ("init", "selection", "crossover", "mutation", "niching", "indicator")


class ConfigurationError(ValueError):
    """Raised for invalid run or experiment settings."""


@dataclass
class Individual:
    decision: np.ndarray
    objectives: np.ndarray
    constraint_violation: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.constraint_violation <= 0.0


@dataclass
class Population:
    """Row-aligned decision, objective and violation arrays.

    Members are stored as matrices so the selection machinery can stay
    vectorized; indexing yields :class:`Individual` views.
    """

    X: np.ndarray
    F: np.ndarray
    CV: np.ndarray
    capacity: int = 0

    def __post_init__(self):
        if self.capacity <= 0:
            self.capacity = len(self.F)

    def __len__(self) -> int:
        return len(self.F)

    def __getitem__(self, i: int) -> Individual:
        return Individual(self.X[i], self.F[i], float(self.CV[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def members(self) -> list[Individual]:
        return list(self)

    def take(self, index, capacity: Optional[int] = None) -> "Population":
        index = np.asarray(index, dtype=int)
        return Population(self.X[index], self.F[index], self.CV[index], capacity or len(index))

    def merge(self, other: "Population") -> "Population":
        return Population(
            np.vstack([self.X, other.X]),
            np.vstack([self.F, other.F]),
            np.concatenate([self.CV, other.CV]),
            self.capacity + other.capacity,
        )

    @classmethod
    def from_individuals(cls, members: Sequence[Individual], capacity: Optional[int] = None) -> "Population":
        X = np.array([ind.decision for ind in members])
        F = np.array([ind.objectives for ind in members], dtype=float)
        CV = np.array([ind.constraint_violation for ind in members], dtype=float)
        return cls(X, F, CV, capacity or len(members))


@dataclass
class RunConfig:
    """Settings for a single optimization run.

    ``p_m=None`` resolves to ``1/d`` for the problem at hand. ``force_mode``
    overrides the update-when-required decision ("static" or "adaptive")
    while still recording the spreading index; it exists for controlled
    comparisons and is ignored by the other two algorithms.
    """

    problem: str
    m: int
    pop_size: int
    max_evaluations: int
    seed: int = 0
    algorithm: str = "nsga3"
    start_fraction: float = 0.2
    h: float = 4.0
    eta_c: float = 20.0
    eta_m: float = 20.0
    p_c: float = 1.0
    p_m: Optional[float] = None
    si_scaling: str = "literal"
    force_mode: Optional[str] = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if not 0.0 < self.start_fraction < 1.0:
            raise ConfigurationError("start_fraction must lie in (0, 1)")
        if self.h <= 0:
            raise ConfigurationError("h must be positive")
        if self.pop_size <= 0:
            raise ConfigurationError("pop_size must be positive")
        if self.max_evaluations < self.pop_size:
            raise ConfigurationError(
                f"budget of {self.max_evaluations} evaluations cannot cover a population of {self.pop_size}"
            )
        if self.si_scaling not in ("literal", "rms"):
            raise ConfigurationError("si_scaling must be 'literal' or 'rms'")
        if self.force_mode not in (None, "static", "adaptive"):
            raise ConfigurationError("force_mode must be None, 'static' or 'adaptive'")
        if not 0.0 <= self.p_c <= 1.0:
            raise ConfigurationError("p_c must lie in [0, 1]")

    @property
    def generations(self) -> int:
        # Counts the initial population as generation 0.
        return self.max_evaluations // self.pop_size

    def mutation_probability(self, d: int) -> float:
        return 1.0 / d if self.p_m is None else self.p_m


class RngStream:
    """Master seed with one forked generator per operator category.

    Identical seeds and call sequences give identical draws, no matter how
    runs are scheduled across processes.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        children = np.random.SeedSequence(self.seed).spawn(len(STREAM_NAMES))
        self._streams = {name: np.random.default_rng(s) for name, s in zip(STREAM_NAMES, children)}

    def __getitem__(self, name: str) -> np.random.Generator:
        return self._streams[name]

    def __getattr__(self, name: str) -> np.random.Generator:
        try:
            return self.__dict__["_streams"][name]
        except KeyError:
            raise AttributeError(name) from None


@dataclass
class EvaluationCounter:
    used: int = 0
    limit: Optional[int] = None

    def charge(self, n: int = 1):
        self.used += n


def evaluate(problem: "ProblemDefinition", x, counter: Optional[EvaluationCounter] = None) -> Individual:
    """Evaluate a single decision vector, charging one evaluation."""
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != problem.d:
        raise ConfigurationError(f"{problem.name} expects {problem.d} decision variables, got shape {x.shape}")
    X, F, CV = problem.evaluate_batch(x[None, :])
    if counter is not None:
        counter.charge(1)
    return Individual(X[0], F[0], float(CV[0]))


def evaluate_population(problem: "ProblemDefinition", X: np.ndarray, counter: Optional[EvaluationCounter] = None,
                        capacity: Optional[int] = None) -> Population:
    if X.ndim != 2 or X.shape[1] != problem.d:
        raise ConfigurationError(f"{problem.name} expects {problem.d} decision variables, got shape {X.shape}")
    X, F, CV = problem.evaluate_batch(X)
    if counter is not None:
        counter.charge(len(X))
    return Population(X, F, CV, capacity or len(X))
