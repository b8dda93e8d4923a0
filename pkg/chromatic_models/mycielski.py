"""
Mycielskian built from free amalgams.

Layout of the result: originals 0..n-1, sibling of i at n+i, apex at 2n.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import pandas as pd

from chromatic_models.coloring import chromatic_number, clique_number
from chromatic_models.errors import DegenerateInputError
from chromatic_models.graph_core import (
    Amalgam,
    Glue,
    Graph,
    VertexSet,
    amalgamate,
    complete_graph,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MycielskiResult:
    graph: Graph
    original: VertexSet
    siblings: Tuple[int, ...]
    apex: int
    steps: Tuple[Amalgam, ...]

    def sibling(self, v: int) -> int:
        return self.siblings[v]


def _sibling_copy(a: Graph, v: int) -> Amalgam:
    """A_v: A amalgamated with a copy of itself over A minus v."""
    rest = tuple(u for u in range(a.n) if u != v)
    return amalgamate(a, a, Glue(rest, rest))


def _star(leaves: int) -> Tuple[Graph, List[Amalgam]]:
    """Centre 0 with leaves 1..leaves, grown one K_2 at a time over the centre."""
    edge = complete_graph(2)
    star = edge
    steps = []
    for _ in range(leaves - 1):
        step = amalgamate(star, edge, Glue((0,), (0,)))
        steps.append(step)
        star = step.graph
    return star, steps


def mycielskian(a: Graph) -> MycielskiResult:
    if a.n == 0:
        raise DegenerateInputError("the Mycielskian needs a nonempty graph")
    n = a.n
    base = tuple(range(n))
    steps: List[Amalgam] = []

    step = _sibling_copy(a, 0)
    steps.append(step)
    tilde = step.graph
    for v in range(1, n):
        a_v = _sibling_copy(a, v)
        steps.append(a_v)
        step = amalgamate(tilde, a_v.graph, Glue(base, base))
        steps.append(step)
        tilde = step.graph

    star, star_steps = _star(n)
    steps.extend(star_steps)
    siblings = tuple(range(n, 2 * n))
    final = amalgamate(tilde, star, Glue(siblings, tuple(range(1, n + 1))))
    steps.append(final)

    result = MycielskiResult(
        graph=final.graph,
        original=frozenset(base),
        siblings=siblings,
        apex=2 * n,
        steps=tuple(steps),
    )
    logger.debug(f"mycielskian: {a!r} -> {final.graph!r} in {len(steps)} amalgams")
    return result


def mycielskian_formula(a: Graph) -> Graph:
    """Same graph from the adjacency rule directly; used as a cross-check."""
    if a.n == 0:
        raise DegenerateInputError("the Mycielskian needs a nonempty graph")
    n = a.n
    edges = list(a.edges())
    for u, v in a.edges():
        edges.append((u, n + v))
        edges.append((v, n + u))
    edges.extend((n + i, 2 * n) for i in range(n))
    return Graph.from_edges(2 * n + 1, edges)


def iterated_mycielskian(a: Graph, k: int) -> List[MycielskiResult]:
    """The k successive Mycielskians of ``a`` (``a`` itself not included)."""
    if a.n == 0:
        raise DegenerateInputError("the Mycielskian needs a nonempty graph")
    if k < 0:
        raise DegenerateInputError("iteration count must be nonnegative")
    out: List[MycielskiResult] = []
    g = a
    for _ in range(k):
        res = mycielskian(g)
        out.append(res)
        g = res.graph
    return out


def ladder_frame(a: Graph, results: List[MycielskiResult], with_chi: bool = True):
    """One row per graph (input first): size, edges, chi, omega, max_degree."""
    rows = []
    for g in [a] + [r.graph for r in results]:
        rows.append(
            {
                "size": g.n,
                "edges": g.edge_count(),
                "chi": chromatic_number(g)[0] if with_chi else None,
                "omega": clique_number(g),
                "max_degree": g.max_degree(),
            }
        )
    return pd.DataFrame(rows, columns=["size", "edges", "chi", "omega", "max_degree"])
