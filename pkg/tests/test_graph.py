import io

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from netsig.graph import (EdgeListError, Graph, distance_matrix, load_coords,
                          load_edge_list, write_coords, write_edge_list)

from conftest import random_graph


def test_karate_matches_reference(karate):
    ref = nx.karate_club_graph()
    assert karate.n == 34 and karate.n_edges == 78
    mine = {frozenset((karate.names[i], karate.names[j])) for i, j in karate.edges}
    theirs = {frozenset((str(u), str(v))) for u, v in ref.edges}
    assert mine == theirs
    assert karate.degrees.sum() == 156
    assert karate.degrees[karate.index_of("0")] == 16
    assert karate.degrees.max() == 17


def test_first_seen_numbering():
    g = load_edge_list("b a\n# comment\n\nc b\n")
    assert g.names == ("b", "a", "c")
    assert g.edge_set() == {(0, 1), (0, 2)}


def test_duplicates_and_self_loops_dropped():
    g, stats = load_edge_list("1 2\n2 1\n3 3\n2 3\n", return_stats=True)
    assert stats.duplicates == 1 and stats.self_loops == 1
    assert g.n_edges == 2
    assert g.degrees[g.index_of("3")] == 1


def test_weighted_input_rejected():
    with pytest.raises(EdgeListError, match="line 2"):
        load_edge_list("1 2\n2 3 0.5\n")


def test_constructor_validates():
    with pytest.raises(ValueError):
        Graph(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 3)])


def test_adjacency_read_only(barbell):
    a = barbell.adjacency
    assert np.array_equal(a, a.T) and not np.any(np.diag(a))
    with pytest.raises(ValueError):
        a[0, 1] = 0


def test_isolated_node_kept():
    g = Graph(4, [(0, 1)])
    assert g.isolated.tolist() == [2, 3]


@given(n=st.integers(1, 25), p=st.floats(0, 1), seed=st.integers(0, 2**32))
def test_edge_list_round_trip(n, p, seed):
    g = random_graph(n, p, seed)
    g = Graph(g.n, g.edges, names=[str(i) for i in range(n)])
    h = load_edge_list(write_edge_list(g))
    # isolated nodes do not survive an edge list, everything else does
    assert {frozenset((h.names[i], h.names[j])) for i, j in h.edges} == \
        {frozenset((str(i), str(j))) for i, j in g.edges}
    assert sorted(h.degrees) == sorted(d for d in g.degrees if d > 0)


def test_coords_round_trip(tmp_path):
    g = load_edge_list(io.BytesIO(b"a b\nb c\n"))
    g = load_coords("id,x,y\nc,2,0\na,0,0\nb,0,1\n", g)
    assert g.coords.tolist() == [[0, 0], [0, 1], [2, 0]]
    d = distance_matrix(g)
    assert d[0, 2] == pytest.approx(2.0) and d[1, 2] == pytest.approx(np.sqrt(5))
    path = tmp_path / "c.csv"
    write_coords(g, str(path))
    g2 = load_coords(path.read_text(), load_edge_list("a b\nb c\n"))
    assert np.array_equal(g2.coords, g.coords)


def test_coords_missing_node():
    g = load_edge_list("a b\n")
    with pytest.raises(EdgeListError):
        load_coords("a,0,0\n", g)


def test_distance_needs_coords(barbell):
    with pytest.raises(ValueError):
        distance_matrix(barbell)
