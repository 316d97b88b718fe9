from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from nsga3ur.algorithms import environmental_selection
from nsga3ur.core import ConfigurationError, Population
from nsga3ur.refgeom import (NormalizationState, associate, build_reference_set, das_dennis,
                             niche_select, perpendicular_distances, simplex_lattice, update_normalization)
from oracles import lattice_by_recursion, point_to_ray


def _rows(A):
    return {tuple(np.round(r, 12)) for r in A}


def test_das_dennis_unit_vectors():
    assert _rows(das_dennis(3, 1).points) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}


def test_das_dennis_h2_has_six_points():
    W = das_dennis(3, 2).points
    assert len(W) == 6 and (0.5, 0.5, 0.0) in _rows(W)


def test_das_dennis_h14_matches_population_size():
    assert len(das_dennis(3, 14)) == 120


@pytest.mark.parametrize("m", range(2, 7))
@pytest.mark.parametrize("H", [1, 2, 3, 5, 8])
def test_lattice_matches_recursive_enumeration(m, H):
    assert _rows(simplex_lattice(m, H)) == _rows(lattice_by_recursion(m, H))


def test_lattice_overflow_and_bad_arguments():
    with pytest.raises(ConfigurationError):
        simplex_lattice(10, 30, max_points=1000)
    with pytest.raises(ConfigurationError):
        simplex_lattice(1, 3)
    with pytest.raises(ConfigurationError):
        simplex_lattice(3, 0)


@pytest.mark.parametrize("m,n,size", [(3, 120, 120), (4, 120, 120)])
def test_single_layer_reference_sets(m, n, size):
    refs = build_reference_set(m, n)
    assert len(refs) == size
    assert refs.n_lattice == size


def test_two_layer_reference_set_for_five_objectives():
    refs = build_reference_set(5, 105)
    # outer lattice H=4 (70 points) plus inner H=3 (35 points) shrunk halfway to the centroid
    assert len(refs) == 105
    assert refs.divisions == 4
    P = refs.points
    assert np.allclose(P.sum(axis=1), 1, atol=1e-9) and (P >= 0).all()
    assert len(_rows(P)) == 105
    inner = P[70:]
    assert np.all(inner >= 0.5 / 5 - 1e-12)


@given(st.integers(2, 6), st.integers(6, 300))
@settings(max_examples=60, deadline=None)
def test_reference_set_properties(m, n):
    if n < m:
        return
    refs = build_reference_set(m, n)
    assert m <= len(refs) <= n
    assert np.allclose(refs.points.sum(axis=1), 1, atol=1e-9)
    assert len(_rows(refs.points)) == len(refs)


def test_normalization_unit_simplex():
    F = np.eye(3)
    state = update_normalization(NormalizationState.initial(3), F)
    assert np.allclose(state.ideal, 0) and np.allclose(state.intercepts, 1, atol=1e-9)


def test_normalization_scaled_simplex():
    state = update_normalization(NormalizationState.initial(3), 2 * np.eye(3))
    assert np.allclose(state.intercepts, 2, atol=1e-9)


def test_normalization_fallback_when_members_identical():
    state = update_normalization(NormalizationState.initial(3), np.ones((5, 3)))
    assert np.all(state.intercepts > 0)
    assert np.allclose(state.intercepts, 1e-12)


def test_normalization_fallback_clips_to_nadir():
    # hyperplane intercepts overshoot the observed range on the first axis
    F = np.array([[1.0, 0.0, 0.0], [0.9, 1.0, 0.0], [0.9, 0.0, 1.0]])
    state = update_normalization(NormalizationState.initial(3), F)
    nadir = F.max(axis=0) - state.ideal
    assert np.all(state.intercepts <= nadir + 1e-12)


def test_ideal_point_persists_across_generations():
    s = update_normalization(NormalizationState.initial(2), np.array([[0.0, 1.0], [1.0, 0.0]]))
    s = update_normalization(s, np.array([[2.0, 3.0], [3.0, 2.0]]))
    assert np.allclose(s.ideal, 0)


@given(arrays(float, st.tuples(st.integers(1, 30), st.just(3)), elements=st.floats(0, 10)))
@settings(max_examples=80, deadline=None)
def test_normalized_members_non_negative(F):
    state = update_normalization(NormalizationState.initial(3), F)
    assert np.all(state.intercepts > 0)
    assert np.all(state.normalize(F) >= -1e-9)


def test_normalization_idempotent_on_unit_simplex():
    W = das_dennis(3, 6).points
    state = update_normalization(NormalizationState.initial(3), W)
    again = update_normalization(NormalizationState.initial(3), state.normalize(W))
    assert np.allclose(again.intercepts, 1, atol=1e-9)


def test_association_examples():
    idx, d = associate(np.array([[0.5, 0.5]]), np.array([[1, 0], [0, 1], [0.5, 0.5]]))
    assert idx[0] == 2 and d[0] == pytest.approx(0, abs=1e-12)
    idx, d = associate(np.array([[1.0, 0.0]]), np.array([[0.5, 0.5], [0, 1]]))
    assert idx[0] == 0 and d[0] == pytest.approx(np.sqrt(2) / 2)
    # equidistant rays (both at distance 0.5): lowest index wins
    idx, d = associate(np.array([[0.5, 0.5]]), np.array([[1, 0], [0, 1]]))
    assert idx[0] == 0 and d[0] == pytest.approx(0.5)


@given(st.integers(0, 10_000), st.integers(1, 50), st.integers(2, 5))
@settings(max_examples=60, deadline=None)
def test_association_is_brute_force_optimal(seed, n, m):
    rng = np.random.default_rng(seed)
    Fn = rng.random((n, m)) * 2
    W = build_reference_set(m, 20).points
    idx, dist = associate(Fn, W)
    for i in range(n):
        brute = [point_to_ray(Fn[i], w) for w in W]
        assert dist[i] == pytest.approx(brute[idx[i]], abs=1e-9)
        assert min(brute) >= dist[i] - 1e-9
    assert np.allclose(perpendicular_distances(Fn, W)[np.arange(n), idx], dist)


def test_niche_select_whole_last_front():
    ref_index = np.array([0, 0, 1, 1])
    chosen = niche_select(ref_index, np.zeros(4), np.array([False, True, True, True]), 2, 3,
                          np.random.default_rng(0))
    assert sorted(chosen) == [1, 2, 3]


def test_niche_select_prefers_empty_niche_and_closest():
    # ref 1 already holds three admitted members; ref 0 has none
    ref_index = np.array([1, 1, 1, 0, 0, 1])
    distance = np.array([0, 0, 0, 0.4, 0.2, 0.01])
    in_last = np.array([False, False, False, True, True, True])
    for seed in range(20):
        chosen = niche_select(ref_index, distance, in_last, 2, 1, np.random.default_rng(seed))
        assert list(chosen) == [4]


def test_niche_select_second_pick_random_among_rest():
    ref_index = np.zeros(3, dtype=int)
    distance = np.array([0.3, 0.1, 0.2])
    seconds = set()
    for seed in range(40):
        chosen = niche_select(ref_index, distance, np.ones(3, bool), 1, 2, np.random.default_rng(seed))
        assert chosen[0] == 1
        seconds.add(int(chosen[1]))
    assert seconds == {0, 2}


@given(st.integers(0, 10_000), st.integers(4, 40))
@settings(max_examples=40, deadline=None)
def test_environmental_selection_returns_n_distinct(seed, n):
    rng = np.random.default_rng(seed)
    F = rng.random((2 * n, 3))
    pop = Population(np.zeros((2 * n, 1)), F, np.zeros(2 * n), 2 * n)
    refs = build_reference_set(3, n)
    chosen, norm = environmental_selection(pop, refs, NormalizationState.initial(3), n, rng)
    assert len(chosen) == n and len(set(chosen.tolist())) == n
    assert np.all(norm.intercepts > 0)


@pytest.mark.parametrize("m", range(2, 7))
def test_lattice_count_law(m):
    for H in range(1, 15):
        W = simplex_lattice(m, H)
        assert len(W) == comb(m + H - 1, H)
        assert np.allclose(W.sum(axis=1), 1, atol=1e-9) and (W >= 0).all()
