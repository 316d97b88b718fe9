"""Generational loops of NSGA-III, A-NSGA-III and NSGA-III-UR.

All three share one engine. They differ only in when the reference set is
adapted after environmental selection: never, every generation, or from
the generation after a one-shot regularity test says the front is
irregular.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .adaptation import Mode, UrState, adapt_reference_points, ur_decide
from .core import ConfigurationError, EvaluationCounter, Population, RngStream, RunConfig, evaluate_population
from .dominance import fast_nondominated_sort, nondominated_mask
from .problems import ProblemDefinition
from .refgeom import (NormalizationState, ReferencePointSet, associate, build_reference_set,
                      niche_select, update_normalization)
from .variation import make_offspring, tournament_select


@dataclass
class GenerationRecord:
    generation: int
    evaluations: int
    n_refs: int
    si: Optional[float] = None
    threshold: Optional[float] = None
    mode: Optional[str] = None


@dataclass
class RunResult:
    population: Population
    trace: list[GenerationRecord]
    seed: int
    duration: float
    evaluations: int
    refs: ReferencePointSet
    ur: Optional[UrState] = None
    config: Optional[RunConfig] = field(default=None, repr=False)
    initial_digest: str = ""

    @property
    def mode(self) -> Optional[str]:
        if self.ur is None:
            return None
        return self.ur.mode.name.lower()

    def nondominated(self) -> np.ndarray:
        F, CV = self.population.F, self.population.CV
        return F[nondominated_mask(F, CV)]


def population_digest(X: np.ndarray) -> str:
    """Short fingerprint of a decision matrix, used to check paired seeds."""
    return hashlib.sha1(np.ascontiguousarray(X, dtype=float).tobytes()).hexdigest()[:16]


def environmental_selection(pop: Population, refs: ReferencePointSet, norm: NormalizationState,
                            n: int, rng: np.random.Generator) -> tuple[np.ndarray, NormalizationState]:
    """Indices of the ``n`` survivors of ``pop`` and the refreshed normalization."""
    fronts = fast_nondominated_sort(pop.F, pop.CV, max_count=n)
    St = np.concatenate(fronts)
    norm = update_normalization(norm, pop.F[St])
    if len(St) == n:
        return St, norm
    last = fronts[-1]
    n_before = len(St) - len(last)
    ref_index, distance = associate(norm.normalize(pop.F[St]), refs.points)
    in_last = np.zeros(len(St), dtype=bool)
    in_last[n_before:] = True
    admitted = niche_select(ref_index, distance, in_last, len(refs), n - n_before, rng)
    return np.concatenate([St[:n_before], St[admitted]]), norm


def _evolve(problem: ProblemDefinition, config: RunConfig, rng: Optional[RngStream], variant: str) -> RunResult:
    if config.m != problem.m:
        raise ConfigurationError(f"config has m={config.m} but {problem.name} has m={problem.m}")
    streams = rng if rng is not None else RngStream(config.seed)
    started = time.perf_counter()
    N = config.pop_size
    gen_max = config.generations
    p_m = config.mutation_probability(problem.d)
    counter = EvaluationCounter(limit=config.max_evaluations)

    refs = build_reference_set(problem.m, N)
    pop = evaluate_population(problem, problem.random_decisions(N, streams.init), counter, N)
    norm = update_normalization(NormalizationState.initial(problem.m), pop.F)
    digest = population_digest(pop.X)

    ur = None
    if variant == "nsga3-ur":
        forced = None if config.force_mode is None else Mode[config.force_mode.upper()]
        ur = UrState(start_fraction=config.start_fraction, h=config.h, scaling=config.si_scaling, forced=forced)

    def record(gen: int) -> GenerationRecord:
        rec = GenerationRecord(gen, counter.used, len(refs))
        if ur is not None and ur.generation == gen:
            rec.si, rec.threshold, rec.mode = ur.si, ur.threshold, ur.mode.name.lower()
        return rec

    if ur is not None:
        ur = ur_decide(ur, 0, gen_max, pop.F, norm)
    trace = [record(0)]

    for gen in range(1, gen_max):
        pool1, pool2 = tournament_select(pop.F, pop.CV, streams.selection)
        X = make_offspring(pop.X, pool1, pool2, problem.encoding, problem.lower, problem.upper,
                           streams.crossover, streams.mutation, config.eta_c, config.eta_m, config.p_c, p_m)
        merged = pop.merge(evaluate_population(problem, X, counter))
        survivors, norm = environmental_selection(merged, refs, norm, N, streams.niching)
        pop = merged.take(survivors, N)

        adaptive = variant == "a-nsga3" or (ur is not None and ur.mode == Mode.ADAPTIVE)
        if adaptive:
            refs = adapt_reference_points(refs, norm.normalize(pop.F))
        if ur is not None:
            ur = ur_decide(ur, gen, gen_max, pop.F, norm)
        trace.append(record(gen))

    return RunResult(pop, trace, streams.seed, time.perf_counter() - started, counter.used, refs, ur, config,
                     digest)


def _check_variant(config: RunConfig, expected: str):
    if config.algorithm != expected:
        raise ConfigurationError(f"config.algorithm is {config.algorithm!r}, expected {expected!r}")


def run_nsga3(problem: ProblemDefinition, config: RunConfig, rng: Optional[RngStream] = None) -> RunResult:
    _check_variant(config, "nsga3")
    return _evolve(problem, config, rng, "nsga3")


def run_a_nsga3(problem: ProblemDefinition, config: RunConfig, rng: Optional[RngStream] = None) -> RunResult:
    _check_variant(config, "a-nsga3")
    return _evolve(problem, config, rng, "a-nsga3")


def run_nsga3_ur(problem: ProblemDefinition, config: RunConfig, rng: Optional[RngStream] = None) -> RunResult:
    _check_variant(config, "nsga3-ur")
    return _evolve(problem, config, rng, "nsga3-ur")


RUNNERS = {"nsga3": run_nsga3, "a-nsga3": run_a_nsga3, "nsga3-ur": run_nsga3_ur}


def run(problem: ProblemDefinition, config: RunConfig, rng: Optional[RngStream] = None) -> RunResult:
    return RUNNERS[config.algorithm](problem, config, rng)
