import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergmbayes.graph import (Graph, GraphError, degree_histogram, esp_histogram,
                             from_edge_list, geodesic_histogram, parse_attributes,
                             parse_edge_list, toggle_edge, write_attributes, write_edge_list)

from conftest import random_graph


def test_triangle_from_edge_list(triangle):
    assert triangle.edge_count == 3
    assert triangle.edges == {(0, 1), (1, 2), (0, 2)}


def test_empty_graph_degrees():
    g = from_edge_list(4, [])
    assert g.edge_count == 0
    assert list(g.degrees()) == [0, 0, 0, 0]


def test_undirected_pairs_are_canonicalised():
    g = from_edge_list(3, [(0, 1), (1, 0)])
    assert g.edge_count == 1
    assert g.edge_list() == [(0, 1)]


def test_directed_keeps_both_orientations():
    g = from_edge_list(3, [(0, 1), (1, 0)], directed=True)
    assert g.edge_count == 2


@pytest.mark.parametrize("pairs", [[(0, 3)], [(-1, 0)], [(1, 1)]])
def test_bad_dyads_rejected(pairs):
    with pytest.raises(GraphError):
        from_edge_list(3, pairs)


def test_attribute_length_checked():
    with pytest.raises(GraphError):
        from_edge_list(3, [], attributes={"a": ["x", "y"]})


def test_toggle_examples(triangle):
    g = from_edge_list(3, [])
    toggle_edge(g, 0, 1)
    assert g.edge_list() == [(0, 1)]

    toggle_edge(triangle, 0, 1)
    assert triangle.edge_list() == [(0, 2), (1, 2)]


def test_toggle_errors():
    g = from_edge_list(3, [])
    with pytest.raises(GraphError):
        g.toggle(1, 1)
    with pytest.raises(GraphError):
        g.toggle(0, 5)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 9).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
             .filter(lambda p: p[0] != p[1]), max_size=20),
    st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1]))))
def test_toggle_is_involution(case):
    n, pairs, (i, j) = case
    g = from_edge_list(n, pairs)
    before = g.edge_list()
    g.toggle(i, j).toggle(j, i)
    assert g.edge_list() == before


def test_degree_histogram_examples(star4):
    assert list(degree_histogram(star4)) == [0, 3, 0, 1]
    assert list(degree_histogram(from_edge_list(5, []))) == [5, 0, 0, 0, 0]


def test_degree_histogram_random(rng):
    g = random_graph(8, 12, rng)
    # oracle: count degrees by scanning the edge set
    deg = [0] * 8
    for i, j in g.edges:
        deg[i] += 1
        deg[j] += 1
    expect = [deg.count(d) for d in range(8)]
    hist = degree_histogram(g)
    assert list(hist) == expect
    assert hist.sum() == 8
    assert (np.arange(8) * hist).sum() == 24


def test_esp_histogram_examples(triangle, star4, k4):
    assert list(esp_histogram(triangle)) == [0, 3]
    assert list(esp_histogram(star4)) == [3, 0, 0]
    assert esp_histogram(k4)[2] == 6


def test_esp_rejects_directed():
    with pytest.raises(GraphError):
        esp_histogram(from_edge_list(3, [(0, 1)], directed=True))


def test_geodesic_examples():
    path = from_edge_list(3, [(0, 1), (1, 2)])
    h = geodesic_histogram(path)
    assert list(h) == [2, 1, 0]
    assert geodesic_histogram(from_edge_list(2, []))[-1] == 1


def floyd_warshall(g):
    n = g.n
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0)
    for i, j in g.edges:
        dist[i, j] = dist[j, i] = 1
    for k in range(n):
        dist = np.minimum(dist, dist[:, [k]] + dist[[k], :])
    return dist


@pytest.mark.parametrize("seed", range(5))
def test_geodesic_matches_floyd_warshall(seed):
    g = random_graph(10, 15, np.random.default_rng(seed))
    dist = floyd_warshall(g)[np.triu_indices(10, 1)]
    expect = [int((dist == d).sum()) for d in range(1, 10)] + [int(np.isinf(dist).sum())]
    assert list(geodesic_histogram(g)) == expect
    assert sum(expect) == 45


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.data())
def test_histogram_sums(n, data):
    ndy = n * (n - 1) // 2
    m = data.draw(st.integers(0, ndy))
    g = random_graph(n, m, np.random.default_rng(data.draw(st.integers(0, 2 ** 32 - 1))))
    assert degree_histogram(g).sum() == n
    assert (np.arange(n) * degree_histogram(g)).sum() == 2 * m
    assert esp_histogram(g).sum() == m
    assert geodesic_histogram(g).sum() == ndy


def test_edge_list_file_round_trip(rng):
    g = random_graph(9, 14, rng)
    text = write_edge_list(g)
    assert parse_edge_list(text) == g


def test_edge_list_file_parsing():
    text = "# a comment\n\nn 4 undirected  # trailing\n0 1\n2 1\n1 0\n"
    g = parse_edge_list(text)
    assert g.n == 4 and g.edge_list() == [(0, 1), (1, 2)]
    d = parse_edge_list("n 3 directed\n0 1\n1 0\n")
    assert d.directed and d.edge_count == 2


@pytest.mark.parametrize("text", ["0 1\n", "n x undirected\n", "n 3 undirected\n0\n",
                                  "n 3 undirected\n0 a\n", "n 3 undirected\n0 3\n", ""])
def test_edge_list_file_errors(text):
    with pytest.raises(GraphError):
        parse_edge_list(text)


def test_attribute_table_round_trip():
    attrs = {"Grade": ["7", "8", "7"], "Sex": ["F", "M", "F"]}
    assert parse_attributes(write_attributes(attrs)) == attrs
    assert parse_attributes("Grade,Sex\n7,F\n8,M\n") == {"Grade": ["7", "8"], "Sex": ["F", "M"]}
    with pytest.raises(GraphError):
        parse_attributes("a\tb\n1\n")


def test_copy_is_independent(triangle):
    g = triangle.copy()
    g.toggle(0, 1)
    assert triangle.edge_count == 3 and g.edge_count == 2


def test_graph_requires_positive_n():
    with pytest.raises(GraphError):
        Graph(0)
