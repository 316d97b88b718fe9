import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nsga3ur.algorithms import environmental_selection, run, run_a_nsga3, run_nsga3, run_nsga3_ur
from nsga3ur.core import ConfigurationError, Population, RngStream, RunConfig
from nsga3ur.dominance import fast_nondominated_sort
from nsga3ur.indicators import igd
from nsga3ur.problems import cached_front, get_problem
from nsga3ur.refgeom import NormalizationState, build_reference_set


def cfg(problem="DTLZ2", m=3, n=40, budget=2000, seed=1, algorithm="nsga3", **kw):
    return RunConfig(problem, m, n, budget, seed=seed, algorithm=algorithm, **kw)


def full_run(name, algorithm, seed=1, m=3):
    problem = get_problem(name, m)
    res = run(problem, cfg(name, m, 120, 60_000, seed, algorithm))
    return igd(res.nondominated(), cached_front(problem)), res


def test_budget_equal_to_population():
    res = run_nsga3(get_problem("DTLZ2", 3), cfg(budget=40))
    assert len(res.population) == 40 and res.evaluations == 40 and len(res.trace) == 1


def test_budget_smaller_than_population_rejected():
    with pytest.raises(ConfigurationError):
        cfg(budget=39)


def test_wrong_variant_and_objective_count():
    with pytest.raises(ConfigurationError):
        run_a_nsga3(get_problem("DTLZ2", 3), cfg(algorithm="nsga3"))
    with pytest.raises(ConfigurationError):
        run_nsga3(get_problem("DTLZ2", 4), cfg())


@pytest.mark.parametrize("algorithm", ["nsga3", "a-nsga3", "nsga3-ur"])
@pytest.mark.parametrize("budget", [2000, 2039, 40 * 7 + 1])
def test_budget_law_and_trace_length(algorithm, budget):
    res = run(get_problem("DTLZ1", 3), cfg("DTLZ1", budget=budget, algorithm=algorithm))
    assert budget - 40 < res.evaluations <= budget
    assert len(res.trace) == budget // 40
    assert len(res.population) == 40
    assert [r.generation for r in res.trace] == list(range(budget // 40))


def test_static_variant_records_no_si():
    res = run_nsga3(get_problem("DTLZ2", 3), cfg())
    assert all(r.si is None and r.mode is None for r in res.trace)
    assert res.mode is None
    assert len({r.n_refs for r in res.trace}) == 1


def test_determinism():
    a = run_nsga3_ur(get_problem("DTLZ7", 3), cfg("DTLZ7", algorithm="nsga3-ur"))
    b = run_nsga3_ur(get_problem("DTLZ7", 3), cfg("DTLZ7", algorithm="nsga3-ur"))
    assert np.array_equal(a.population.X, b.population.X) and np.array_equal(a.population.F, b.population.F)
    assert a.initial_digest == b.initial_digest


def test_adaptive_refs_never_below_lattice():
    res = run_a_nsga3(get_problem("DTLZ7", 3), cfg("DTLZ7", algorithm="a-nsga3"))
    lattice = len(build_reference_set(3, 40))
    assert all(r.n_refs >= lattice for r in res.trace)
    assert max(r.n_refs for r in res.trace) > lattice


@pytest.mark.parametrize("seed", range(5))
def test_forced_static_matches_nsga3(seed):
    p = get_problem("DTLZ2", 3)
    a = run_nsga3(p, cfg(seed=seed))
    b = run_nsga3_ur(p, cfg(seed=seed, algorithm="nsga3-ur", force_mode="static"))
    assert np.array_equal(a.population.X, b.population.X)
    assert b.mode == "static" and sum(r.si is not None for r in b.trace) == 1


def test_forced_adaptive_from_start_matches_a_nsga3():
    p = get_problem("IDTLZ1", 3)
    a = run_a_nsga3(p, cfg("IDTLZ1", seed=4, algorithm="a-nsga3"))
    b = run_nsga3_ur(p, cfg("IDTLZ1", seed=4, algorithm="nsga3-ur", force_mode="adaptive",
                            start_fraction=0.01))
    assert b.ur.generation == 0
    assert [r.n_refs for r in a.trace] == [r.n_refs for r in b.trace]
    assert np.array_equal(a.population.X, b.population.X)


def test_adaptation_starts_after_trigger():
    res = run_nsga3_ur(get_problem("IDTLZ1", 3), cfg("IDTLZ1", budget=4000, algorithm="nsga3-ur"))
    trigger = res.ur.generation
    assert trigger == int(0.2 * 100) and res.mode == "adaptive"
    lattice = res.trace[0].n_refs
    assert all(r.n_refs == lattice for r in res.trace[: trigger + 1])
    assert any(r.n_refs != lattice for r in res.trace[trigger + 1:])
    decided = [r for r in res.trace if r.si is not None]
    assert len(decided) == 1 and decided[0].generation == trigger


def test_unforced_trigger_matches_a_nsga3_schedule():
    # an adaptive run is NSGA-III up to the trigger, then adapts like A-NSGA-III
    p = get_problem("DTLZ5", 3)
    ur = run_nsga3_ur(p, cfg("DTLZ5", seed=2, algorithm="nsga3-ur"))
    static = run_nsga3(p, cfg("DTLZ5", seed=2))
    trigger = ur.ur.generation
    assert [r.n_refs for r in ur.trace[: trigger + 1]] == [r.n_refs for r in static.trace[: trigger + 1]]
    assert ur.trace[trigger + 1].n_refs >= ur.trace[trigger].n_refs


def test_constrained_and_binary_problems_run():
    res = run(get_problem("WRP", 5), cfg("WRP", 5, 105, 1050))
    assert len(res.population) == 105 and np.all(res.population.CV >= 0)
    res = run(get_problem("MOKP", 3), cfg("MOKP", 3, 40, 800, algorithm="nsga3-ur"))
    assert res.population.X.dtype == bool and np.all(res.population.F <= 0)


def test_five_objective_population_size():
    res = run(get_problem("DTLZ2", 5), cfg("DTLZ2", 5, 105, 1050))
    assert len(res.population) == 105 and len(res.refs) == 105


@given(st.integers(0, 100_000), st.integers(5, 40))
@settings(max_examples=40, deadline=None)
def test_elitism_of_environmental_selection(seed, n):
    rng = np.random.default_rng(seed)
    F = rng.random((2 * n, 3))
    pop = Population(np.zeros((2 * n, 1)), F, np.zeros(2 * n), 2 * n)
    chosen, _ = environmental_selection(pop, build_reference_set(3, n), NormalizationState.initial(3), n, rng)
    front0 = set(fast_nondominated_sort(F)[0].tolist())
    chosen = set(chosen.tolist())
    if len(front0) <= n:
        assert front0 <= chosen
    else:
        assert chosen <= front0


def test_rng_stream_argument_equivalent_to_seed():
    p = get_problem("DTLZ2", 3)
    a = run_nsga3(p, cfg(seed=9))
    b = run_nsga3(p, cfg(seed=9), RngStream(9))
    assert np.array_equal(a.population.F, b.population.F)


def test_dtlz2_full_budget_igd():
    value, res = full_run("DTLZ2", "nsga3")
    assert 0.045 <= value <= 0.055
    assert res.evaluations == 60_000


def test_a_nsga3_dtlz5_igd():
    value, _ = full_run("DTLZ5", "a-nsga3")
    assert 0.006 <= value <= 0.011


def test_ur_idtlz1_igd():
    value, res = full_run("IDTLZ1", "nsga3-ur")
    assert 0.018 <= value <= 0.021
    assert res.mode == "adaptive"
