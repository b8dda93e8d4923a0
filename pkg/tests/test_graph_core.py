from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from conftest import random_graph, to_nx
from hypothesis import given, settings
from hypothesis import strategies as st

from chromatic_models.errors import DegenerateInputError, StructuralError
from chromatic_models.graph_core import (
    Embedding,
    Glue,
    Graph,
    amalgamate,
    bits,
    complete_graph,
    complete_multipartite,
    cycle_graph,
    disjoint_clique_union,
    disjoint_union,
    edgeless_graph,
    empty_graph,
    extend_isomorphism,
    find_isomorphism,
    free_amalgam,
    half_graph,
    induced_subgraph,
    mask_of,
    path_extension,
    path_graph,
    shift_graph,
)


@st.composite
def small_graphs(draw, max_n=8):
    n = draw(st.integers(min_value=0, max_value=max_n))
    pairs = list(combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, k in zip(pairs, keep) if k])


def test_bits_and_mask_of():
    assert list(bits(0b101001)) == [0, 3, 5]
    assert mask_of([0, 3, 5]) == 0b101001
    assert list(bits(0)) == []


def test_rows_must_be_symmetric():
    with pytest.raises(StructuralError):
        Graph(2, (0b10, 0))


def test_loops_rejected():
    with pytest.raises(StructuralError):
        Graph(1, (0b1,))
    with pytest.raises(StructuralError):
        Graph.from_edges(3, [(1, 1)])


def test_edge_outside_range():
    with pytest.raises(StructuralError):
        Graph.from_edges(3, [(0, 3)])


def test_basic_queries():
    g = cycle_graph(5)
    assert g.edge_count() == 5
    assert g.degrees() == [2] * 5
    assert g.neighbors(0) == [1, 4]
    assert g.is_independent([0, 2])
    assert not g.is_clique([0, 2])
    assert not g.has_triangle()
    assert complete_graph(3).has_triangle()


def test_generators():
    assert empty_graph().n == 0
    assert edgeless_graph(4).edge_count() == 0
    assert complete_graph(5).edge_count() == 10
    assert complete_multipartite([2, 3]).edge_count() == 6
    assert disjoint_clique_union([3, 2]).edge_count() == 4
    assert path_graph(4).edge_count() == 3
    with pytest.raises(DegenerateInputError):
        complete_graph(0)
    with pytest.raises(StructuralError):
        cycle_graph(2)


def test_half_graph_layout():
    g = half_graph(3)
    assert g.n == 6
    assert {(u, v) for u, v in g.edges()} == {(0, 4), (0, 5), (1, 5)}
    assert g.labels[0] == ("a", 1)
    assert g.labels[5] == ("b", 3)


def test_path_extension_endpoints():
    g = path_extension(4)
    assert g.n == 5
    assert g.degree(0) == 1 and g.degree(1) == 1
    assert nx.shortest_path_length(to_nx(g), 0, 1) == 4


def test_shift_graph_matches_definition():
    g = shift_graph(5, 2)
    assert g.n == 10
    for u, v in combinations(range(g.n), 2):
        s, t = g.labels[u], g.labels[v]
        expect = s[1] == t[0] or t[1] == s[0]
        assert g.adjacent(u, v) == expect


def test_shift_graph_bad_params():
    with pytest.raises(StructuralError):
        shift_graph(5, 1)
    with pytest.raises(StructuralError):
        shift_graph(2, 3)


def test_free_amalgam_layout():
    b = path_graph(3)
    c = path_graph(3)
    am = amalgamate(b, c, Glue((2,), (0,)))
    assert am.graph.n == 5
    assert am.other_map == (2, 3, 4)
    assert am.new_vertices == frozenset({3, 4})
    assert am.graph.edge_count() == 4
    assert not am.graph.adjacent(1, 3)


def test_free_amalgam_adds_no_cross_edges():
    b = complete_graph(3)
    c = complete_graph(3)
    g = free_amalgam(b, c, Glue((0, 1), (0, 1)))
    assert g.n == 4
    assert not g.adjacent(2, 3)
    assert g.edge_count() == 5


def test_glue_must_preserve_edges():
    with pytest.raises(StructuralError):
        amalgamate(complete_graph(2), edgeless_graph(2), Glue((0, 1), (0, 1)))


def test_glue_rejects_non_injective_maps():
    with pytest.raises(StructuralError):
        Glue((0, 0), (0, 1))


@given(small_graphs(), small_graphs())
@settings(max_examples=60, deadline=None)
def test_embeddings_of_amalgam_are_induced(b, c):
    am = amalgamate(b, c, Glue.empty())
    assert Embedding(tuple(range(b.n))).is_induced(b, am.graph)
    assert Embedding(am.other_map).is_induced(c, am.graph)
    assert am.graph.edge_count() == b.edge_count() + c.edge_count()


def test_disjoint_union_is_isomorphic_to_networkx():
    g = disjoint_union(cycle_graph(5), complete_graph(3))
    h = nx.disjoint_union(nx.cycle_graph(5), nx.complete_graph(3))
    assert nx.is_isomorphic(to_nx(g), h)


def test_induced_subgraph_renumbers():
    g = cycle_graph(6)
    h = induced_subgraph(g, [5, 0, 1])
    assert h.n == 3
    assert {(u, v) for u, v in h.edges()} == {(0, 1), (0, 2)}


def test_find_isomorphism_agrees_with_networkx():
    gen = np.random.default_rng(3)
    for _ in range(25):
        g = random_graph(gen, 7)
        perm = gen.permutation(7)
        h = Graph.from_edges(7, [(perm[u], perm[v]) for u, v in g.edges()])
        iso = find_isomorphism(g, h)
        assert iso is not None
        assert iso.is_induced(g, h)
        other = random_graph(gen, 7)
        found = find_isomorphism(g, other)
        assert (found is not None) == nx.is_isomorphic(to_nx(g), to_nx(other))


def test_extend_isomorphism_respects_partial_map():
    g = cycle_graph(5)
    iso = extend_isomorphism(g, g, {0: 2, 1: 3})
    assert iso is not None
    assert iso(0) == 2 and iso(1) == 3
    assert iso.is_induced(g, g)
    # 0 and 2 are non-adjacent in C5, so they cannot go to an edge
    assert extend_isomorphism(g, g, {0: 0, 2: 1}) is None


def test_embedding_rejects_duplicates():
    with pytest.raises(StructuralError):
        Embedding((0, 0))


@given(small_graphs(max_n=6), small_graphs(max_n=6), st.data())
@settings(max_examples=60, deadline=None)
def test_free_amalgam_counts_and_commutes(b, c, data):
    # c's first ``size`` vertices are rewired to copy the base picked out of b
    size = data.draw(st.integers(min_value=0, max_value=min(b.n, c.n)))
    into_b = tuple(data.draw(st.permutations(range(b.n)))[:size])
    base_edges = [
        (i, j)
        for i, j in combinations(range(size), 2)
        if b.adjacent(into_b[i], into_b[j])
    ]
    outside = [(u, v) for u, v in c.edges() if not (u < size and v < size)]
    c = Graph.from_edges(c.n, outside + base_edges)
    glue = Glue(into_b, tuple(range(size)))
    am = amalgamate(b, c, glue)
    assert am.graph.n == b.n + c.n - size
    assert am.graph.edge_count() == b.edge_count() + c.edge_count() - len(base_edges)
    swapped = amalgamate(c, b, glue.swapped())
    assert find_isomorphism(am.graph, swapped.graph) is not None


def test_generators_are_simple():
    for g in (
        complete_multipartite([1, 2, 3]),
        disjoint_clique_union([2, 3]),
        half_graph(4),
        shift_graph(6, 3),
        path_extension(3),
    ):
        for v in range(g.n):
            assert not g.adjacent(v, v)
            assert all(g.adjacent(u, v) for u in g.neighbors(v))


@pytest.mark.parametrize("n", range(2, 13))
def test_shift_graphs_are_triangle_free(n):
    g = shift_graph(n, 2)
    assert not any(
        g.adjacent(u, v) and g.adjacent(v, w) and g.adjacent(u, w)
        for u, v, w in combinations(range(g.n), 3)
    )


def test_half_graph_sides_are_independent():
    k = 5
    g = half_graph(k)
    assert g.is_independent(range(k))
    assert g.is_independent(range(k, 2 * k))
