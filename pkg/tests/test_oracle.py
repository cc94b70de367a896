from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bridged_triangles, cycle, path, random_connected, star
from nirm.generators import dataset_specs, generate
from nirm.graph import Graph, gcc_size, mask_from
from nirm.oracle import (
    OracleConfig,
    SearchBudgetError,
    find_all_min_tas,
    gcc_limit,
    initial_scores,
    label_sample,
    propagate_scores,
    rank_labels,
)
from oracles import naive_min_tas


def _theta_for(limit, n):
    return limit / n


def test_star_center():
    g = star(5)
    assert find_all_min_tas(g, OracleConfig(_theta_for(1, 6))) == [(0,)]


def test_bridged_triangles_sets():
    g = bridged_triangles()
    a, b, c, d, e, f = range(6)
    sets = find_all_min_tas(g, OracleConfig(_theta_for(2, 6)))
    assert sets == sorted([(c, d), (c, e), (c, f), (a, d), (b, d)])
    # same answer from brute force
    assert sets == naive_min_tas(6, list(g.edges()), 2)


def test_edgeless_graph_is_already_dismantled():
    g = Graph.from_edges(5, [])
    assert find_all_min_tas(g, OracleConfig(0.2)) == [()]
    s = label_sample(g, OracleConfig(0.2))
    assert s.k_star == 0
    assert not s.labels.any()


def test_gcc_limit_rounding():
    assert gcc_limit(0.3, 10) == 3
    assert gcc_limit(0.2, 21) == 5
    assert gcc_limit(0.01, 25) == 1


def test_search_budget():
    with pytest.raises(SearchBudgetError):
        find_all_min_tas(cycle(30), OracleConfig(0.1, max_tas_size=3))


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(0.0)
    with pytest.raises(ValueError):
        OracleConfig(0.2, label_mode="weird")


def test_initial_scores_bridged():
    g = bridged_triangles()
    c0 = initial_scores(g, find_all_min_tas(g, OracleConfig(2 / 6)))
    np.testing.assert_allclose(c0, [1 / 3, 1 / 3, 1, 1, 1 / 3, 1 / 3], rtol=0, atol=1e-12)


def test_initial_scores_single_set_and_empty():
    g = path(5)
    np.testing.assert_array_equal(initial_scores(g, [(1, 3)]), [0, 1, 0, 1, 0])
    with pytest.raises(ValueError):
        initial_scores(g, [])


def test_propagate_exact_fractions():
    g = bridged_triangles()
    c0 = [Fraction(1, 3), Fraction(1, 3), Fraction(1), Fraction(1), Fraction(1, 3), Fraction(1, 3)]
    adj = g.adjacency
    expect = [sum(c0[j] / len(adj[j]) for j in adj[i]) + c0[i] for i in range(6)]
    assert expect[0] == Fraction(5, 6) and expect[2] == Fraction(5, 3)
    got = propagate_scores(g, [float(x) for x in c0])
    np.testing.assert_allclose(got, [float(x) for x in expect], rtol=0, atol=1e-12)
    assert sum(expect) == Fraction(20, 3)


def test_propagate_trivia():
    g = path(4)
    np.testing.assert_array_equal(propagate_scores(g, np.zeros(4)), np.zeros(4))
    c = propagate_scores(Graph.from_edges(3, [(0, 1)]), [0.0, 0.0, 0.7])
    assert c[2] == 0.7


def test_star_labels():
    s = label_sample(star(5), OracleConfig(1 / 6))
    np.testing.assert_allclose(s.labels, [1, 0.2, 0.2, 0.2, 0.2, 0.2], rtol=0, atol=1e-15)


def test_bridged_labels():
    s = label_sample(bridged_triangles(), OracleConfig(2 / 6))
    np.testing.assert_allclose(s.labels, s.scores / (5 / 3), rtol=0, atol=1e-15)


def test_orbit_members_share_labels():
    s = label_sample(cycle(8), OracleConfig(0.25))
    assert np.ptp(s.labels) == 0


def test_rank_mode():
    np.testing.assert_allclose(rank_labels(np.array([0.0, 2.0, 1.0, 2.0])), [0, 1, 0.5, 1])
    np.testing.assert_allclose(rank_labels(np.array([1.0, 3.0])), [0.5, 1.0])
    s = label_sample(bridged_triangles(), OracleConfig(2 / 6, label_mode="rank"))
    assert s.labels.max() == 1.0
    order = np.argsort(s.scores)
    assert np.all(np.diff(s.labels[order]) >= 0)


def _check_sample_invariants(g, cfg):
    s = label_sample(g, cfg)
    limit = gcc_limit(cfg.theta_train, g.n)
    k = s.k_star
    assert all(len(t) == k for t in s.optimal_sets)
    for t in s.optimal_sets:
        assert gcc_size(g, mask_from(g, t)) <= limit
        for drop in t:
            sub = [v for v in t if v != drop]
            assert gcc_size(g, mask_from(g, sub)) > limit
    assert s.initial_scores.max() == 1.0
    deg = g.degrees
    lhs = s.scores.sum()
    rhs = s.initial_scores.sum() + s.initial_scores[(s.initial_scores > 0) & (deg > 0)].sum()
    assert abs(lhs - rhs) <= 1e-12
    assert s.labels.max() == 1.0
    return s


def test_invariants_on_training_graphs():
    for spec in dataset_specs(12, master_seed=4):
        _check_sample_invariants(generate(spec), OracleConfig())


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 11), st.floats(0.05, 0.5), st.integers(0, 10**6), st.sampled_from([0.15, 0.2, 0.3]))
def test_matches_naive_enumeration(n, p, seed, theta):
    g = random_connected(n, p, np.random.default_rng(seed))
    got = find_all_min_tas(g, OracleConfig(theta))
    assert got == naive_min_tas(n, list(g.edges()), gcc_limit(theta, n))


def test_labels_follow_relabeling(rng):
    g = random_connected(14, 0.15, rng)
    perm = rng.permutation(g.n)
    a = label_sample(g, OracleConfig(0.2))
    b = label_sample(g.relabel(perm), OracleConfig(0.2))
    np.testing.assert_allclose(b.labels[perm], a.labels, rtol=0, atol=1e-15)
    assert sorted(tuple(sorted(perm[list(t)].tolist())) for t in a.optimal_sets) == b.optimal_sets


def test_two_overlapping_optimal_sets():
    # nodes 2, 3, 8 sit in both sets; 7 and 9 in one each
    g = path(10)
    c0 = initial_scores(g, [(2, 3, 7, 8), (2, 3, 8, 9)])
    np.testing.assert_array_equal(c0, [0, 0, 1, 1, 0, 0, 0, 0.5, 1, 0.5])
