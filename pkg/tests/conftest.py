from itertools import combinations, permutations, product

import networkx as nx
import numpy as np
import pytest

from chromatic_models.config import get_settings
from chromatic_models.graph_core import Graph, cycle_graph
from chromatic_models.mycielski import mycielskian
from chromatic_models.predimension import Alpha, in_k_alpha


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def random_graph(gen: np.random.Generator, n: int, p: float = 0.5) -> Graph:
    edges = [(u, v) for u, v in combinations(range(n), 2) if gen.random() < p]
    return Graph.from_edges(n, edges)


def brute_chromatic(g: Graph) -> int:
    """Smallest k with a proper k-colouring, by plain backtracking."""
    if g.n == 0:
        return 0
    for k in range(1, g.n + 1):
        colors = [-1] * g.n

        def place(v: int) -> bool:
            if v == g.n:
                return True
            for c in range(k):
                if all(colors[u] != c for u in g.neighbors(v) if u < v):
                    colors[v] = c
                    if place(v + 1):
                        return True
            colors[v] = -1
            return False

        if place(0):
            return k
    raise AssertionError("unreachable")


def brute_clique(g: Graph) -> int:
    return max((len(c) for c in nx.find_cliques(to_nx(g))), default=0)


def brute_half_order(g: Graph, cap: int) -> int:
    """Largest k <= cap with a_i ~ b_j iff i < j, over all ordered 2k-tuples."""
    best = 0
    for k in range(1, cap + 1):
        tuples = permutations(range(g.n), 2 * k)
        if not any(_is_half(g, t[:k], t[k:]) for t in tuples):
            break
        best = k
    return best


def _is_half(g: Graph, a, b) -> bool:
    k = len(a)
    return all(g.adjacent(a[i], b[j]) == (i < j) for i in range(k) for j in range(k))


def random_k_alpha(
    gen: np.random.Generator, alpha: Alpha, max_n: int = 14
) -> Graph:
    """Member of K_alpha grown by per-edge rejection through ``in_k_alpha``."""
    n = int(gen.integers(1, max_n + 1))
    g = Graph(n, (0,) * n)
    pairs = list(combinations(range(n), 2))
    for idx in gen.permutation(len(pairs))[: 3 * n]:
        u, v = pairs[idx]
        rows = list(g.rows)
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        candidate = Graph(n, tuple(rows))
        if in_k_alpha(candidate, alpha)[0]:
            g = candidate
    return g


def exhaustive_closed(g: Graph, a, alpha: Alpha, strict: bool) -> bool:
    """Definition of closedness by enumerating every superset."""
    a = frozenset(a)
    rest = [v for v in range(g.n) if v not in a]
    base = len(a) - alpha.value * g.edges_within(sum(1 << v for v in a))
    for pick in product((0, 1), repeat=len(rest)):
        extra = [v for v, keep in zip(rest, pick) if keep]
        if not extra:
            continue
        s = a | set(extra)
        value = len(s) - alpha.value * g.edges_within(sum(1 << v for v in s))
        if value < base or (strict and value == base):
            return False
    return True


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def grotzsch() -> Graph:
    return mycielskian(cycle_graph(5)).graph


@pytest.fixture
def clebsch() -> Graph:
    """Folded 5-cube: 4-bit words, adjacent at Hamming distance 1 or 4."""
    edges = [
        (u, v)
        for u, v in combinations(range(16), 2)
        if bin(u ^ v).count("1") in (1, 4)
    ]
    return Graph.from_edges(16, edges)


@pytest.fixture
def settings_env(monkeypatch):
    """Set CHROMATIC_MODELS_* variables for one test."""

    def apply(**values):
        for key, value in values.items():
            monkeypatch.setenv(f"CHROMATIC_MODELS_{key.upper()}", str(value))
        get_settings.cache_clear()

    yield apply
    get_settings.cache_clear()
