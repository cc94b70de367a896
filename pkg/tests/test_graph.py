import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cycle, path, random_connected, star
from nirm.graph import (
    Graph,
    ShapeError,
    components,
    format_edge_list,
    gcc_size,
    k_core,
    local_clustering,
    mask_from,
    parse_edge_list,
    read_edge_list,
    surviving_degrees,
    two_hop_count,
    write_edge_list,
)
from oracles import adjacency, clustering, flood_components, largest, two_hop


edge_lists = st.integers(1, 14).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=40),
    )
)


def test_from_edges_drops_loops_and_duplicates():
    g = Graph.from_edges(3, [(0, 1), (1, 0), (1, 1), (0, 1), (1, 2)])
    assert g.num_edges == 2
    assert g.edge_set() == {(0, 1), (1, 2)}
    np.testing.assert_array_equal(g.degrees, [1, 2, 1])


def test_arrays_are_read_only():
    g = path(4)
    with pytest.raises(ValueError):
        g.indices[0] = 3


def test_out_of_range_endpoint():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 2)])


def test_gcc_examples():
    assert gcc_size(path(5)) == 5
    assert gcc_size(path(5), mask_from(path(5), [2])) == 2
    assert gcc_size(star(6), mask_from(star(6), [0])) == 1
    assert gcc_size(Graph.from_edges(4, [])) == 1


def test_everything_removed():
    g = cycle(4)
    assert gcc_size(g, np.ones(4, bool)) == 0
    assert components(g, np.ones(4, bool)) == []


def test_mask_shape_error():
    with pytest.raises(ShapeError):
        gcc_size(path(4), np.zeros(3, bool))


def test_two_hop_and_clustering_errors():
    with pytest.raises(IndexError):
        two_hop_count(path(3), 5)
    with pytest.raises(IndexError):
        local_clustering(path(3), -1)


def test_local_counts_examples():
    g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert local_clustering(g, 0) == 1.0
    assert two_hop_count(path(5), 0) == 1
    assert two_hop_count(star(4), 0) == 0
    assert two_hop_count(star(4), 1) == 3


def test_k_core_of_cycle_with_tail():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)])
    outside = k_core(g, None, 2)
    np.testing.assert_array_equal(np.flatnonzero(~outside), [0, 1, 2])


@settings(max_examples=150, deadline=None)
@given(edge_lists, st.data())
def test_components_match_flood_fill(ne, data):
    n, edges = ne
    g = Graph.from_edges(n, edges)
    removed = data.draw(st.sets(st.integers(0, n - 1)))
    adj = adjacency(n, edges)
    expect = sorted(map(sorted, flood_components(adj, removed)))
    got = sorted(map(sorted, components(g, mask_from(g, removed))))
    assert got == expect
    assert gcc_size(g, mask_from(g, removed)) == largest(adj, removed)
    deg = surviving_degrees(g, mask_from(g, removed))
    for v in range(n):
        if v not in removed:
            assert deg[v] == len(adj[v] - set(removed))


@settings(max_examples=80, deadline=None)
@given(edge_lists)
def test_two_hop_and_clustering_match_bfs(ne):
    n, edges = ne
    g = Graph.from_edges(n, edges)
    adj = adjacency(n, edges)
    for v in range(n):
        assert two_hop_count(g, v) == two_hop(adj, v)
        assert local_clustering(g, v) == pytest.approx(clustering(adj, v), abs=1e-15)


def test_parse_comments_and_remap():
    g = parse_edge_list("# header\n% other\n10 20\n20 x\n\n7\n")
    assert g.n == 4
    assert g.names == (10, 20, "x", 7)
    assert g.edge_set() == {(0, 1), (1, 2)}
    assert g.degrees[3] == 0


def test_extra_columns_ignored():
    g = parse_edge_list("1 2 0.5 1999\n2 3 1.0 2001\n")
    assert g.edge_set() == {(0, 1), (1, 2)}


def test_round_trip_generated_graph(tmp_path, rng):
    g = random_connected(25, 0.1, rng)
    p = tmp_path / "g.edges"
    write_edge_list(g, p, header="hello")
    h = read_edge_list(p)
    assert h.n == g.n
    back = {tuple(sorted((h.names[u], h.names[v]))) for u, v in h.edges()}
    assert back == g.edge_set()


def test_round_trip_keeps_names_and_isolated_nodes():
    g = parse_edge_list("b a\n42\nc b\n")
    h = parse_edge_list(format_edge_list(g))
    assert set(h.names) == set(g.names)
    named = {frozenset((g.names[u], g.names[v])) for u, v in g.edges()}
    assert {frozenset((h.names[u], h.names[v])) for u, v in h.edges()} == named


def test_relabel_and_induced(rng):
    g = random_connected(10, 0.2, rng)
    perm = rng.permutation(10)
    h = g.relabel(perm)
    assert h.edge_set() == {tuple(sorted((int(perm[u]), int(perm[v])))) for u, v in g.edges()}
    keep = np.zeros(10, bool)
    keep[[1, 3, 4, 7]] = True
    sub, old = g.induced(keep)
    np.testing.assert_array_equal(old, [1, 3, 4, 7])
    for u, v in sub.edges():
        assert (int(old[u]), int(old[v])) in g.edge_set()
