"""
Exact chromatic number, k-colourability and maximum clique.

All results come back as certificates (``Coloring``, ``CliqueWitness``)
that ``verify_coloring`` / ``Graph.is_clique`` can re-check directly.
"""

import logging
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, computed_field

from chromatic_models.errors import StructuralError
from chromatic_models.graph_core import Graph, bits

logger = logging.getLogger(__name__)


class Coloring(BaseModel):
    """Total map vertex -> colour index (position v holds the colour of v)."""

    model_config = ConfigDict(frozen=True)

    colors: Tuple[int, ...]

    @computed_field
    @property
    def palette_size(self) -> int:
        return len(set(self.colors))

    def classes(self) -> List[List[int]]:
        out: dict = {}
        for v, c in enumerate(self.colors):
            out.setdefault(c, []).append(v)
        return [out[c] for c in sorted(out)]

    def __repr__(self) -> str:
        return f"Coloring(palette_size={self.palette_size}, colors={self.colors})"


class CliqueWitness(BaseModel):
    model_config = ConfigDict(frozen=True)

    members: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)


def canonical(colors: Sequence[int]) -> Coloring:
    """Relabel colours in order of first use, so vertex 0 always gets colour 0."""
    relabel: dict = {}
    out = []
    for c in colors:
        if c not in relabel:
            relabel[c] = len(relabel)
        out.append(relabel[c])
    return Coloring(colors=tuple(out))


def verify_coloring(g: Graph, c: Coloring) -> bool:
    if len(c.colors) != g.n:
        raise StructuralError(
            f"partial coloring: {len(c.colors)} colours for {g.n} vertices"
        )
    if any(x < 0 for x in c.colors):
        raise StructuralError("colour indices must be nonnegative")
    return all(c.colors[u] != c.colors[v] for u, v in g.edges())


def greedy_color_with_order(g: Graph, order: Sequence[int]) -> Coloring:
    """Colour in reverse elimination order with the least colour not seen on a
    coloured neighbour."""
    if sorted(order) != list(range(g.n)):
        raise StructuralError("order is not a permutation of the vertices")
    colors = [-1] * g.n
    for v in reversed(order):
        taken = {colors[u] for u in bits(g.rows[v]) if colors[u] >= 0}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return Coloring(colors=tuple(colors))


def dsatur_greedy(g: Graph) -> Coloring:
    colors = [-1] * g.n
    seen = [0] * g.n  # bitmask of colours on coloured neighbours
    degree = g.degrees()
    for _ in range(g.n):
        v = max(
            (u for u in range(g.n) if colors[u] < 0),
            key=lambda u: (seen[u].bit_count(), degree[u], -u),
        )
        c = 0
        while (seen[v] >> c) & 1:
            c += 1
        colors[v] = c
        for u in bits(g.rows[v]):
            seen[u] |= 1 << c
    return canonical(colors)


# --- maximum clique ---


def _color_sort(cand: int, rows: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Greedy colour classes over ``cand``; the colour number bounds any clique
    among the vertices up to that position."""
    order: List[int] = []
    bounds: List[int] = []
    colour = 0
    work = cand
    while work:
        colour += 1
        q = work
        while q:
            v = (q & -q).bit_length() - 1
            order.append(v)
            bounds.append(colour)
            work &= ~(1 << v)
            q &= ~(1 << v)
            q &= ~rows[v]
    return order, bounds


def max_clique(g: Graph) -> CliqueWitness:
    rows = g.rows
    best = [0, 0]  # size, mask
    expanded = 0

    def expand(size: int, chosen: int, cand: int) -> None:
        nonlocal expanded
        order, bounds = _color_sort(cand, rows)
        for i in range(len(order) - 1, -1, -1):
            if size + bounds[i] <= best[0]:
                return
            v = order[i]
            expanded += 1
            nxt = cand & rows[v]
            if nxt:
                expand(size + 1, chosen | (1 << v), nxt)
            elif size + 1 > best[0]:
                best[0], best[1] = size + 1, chosen | (1 << v)
            cand &= ~(1 << v)

    if g.n:
        expand(0, 0, g.vertex_mask)
    logger.debug(f"max_clique: omega={best[0]} after {expanded} expansions")
    return CliqueWitness(members=tuple(bits(best[1])))


def clique_number(g: Graph) -> int:
    return max_clique(g).size


# --- exact colouring ---


class _KColoring:
    """Decision search for a proper colouring with at most k colours.

    DSATUR vertex choice (fewest remaining colours, then higher degree, then
    lower index), forward checking on neighbour domains, and new colours opened
    only as ``max used + 1``.
    """

    def __init__(self, g: Graph, k: int):
        self.g = g
        self.k = k
        self.degree = g.degrees()
        self.colors = [-1] * g.n
        self.domain = [(1 << k) - 1] * g.n
        self.nodes = 0

    def run(self) -> Optional[List[int]]:
        if self.g.n == 0:
            return []
        if self.k <= 0:
            return None
        return self.colors if self._assign(0, -1) else None

    def _pick(self) -> int:
        best, key = -1, None
        for v in range(self.g.n):
            if self.colors[v] >= 0:
                continue
            cand = (-self.domain[v].bit_count(), self.degree[v], -v)
            if key is None or cand > key:
                best, key = v, cand
        return best

    def _assign(self, placed: int, max_used: int) -> bool:
        if placed == self.g.n:
            return True
        self.nodes += 1
        v = self._pick()
        allowed = self.domain[v] & ((1 << min(self.k, max_used + 2)) - 1)
        for c in bits(allowed):
            trail = []
            wiped = False
            bit = 1 << c
            for u in bits(self.g.rows[v]):
                if self.colors[u] < 0 and self.domain[u] & bit:
                    self.domain[u] &= ~bit
                    trail.append(u)
                    if not self.domain[u]:
                        wiped = True
                        break
            if not wiped:
                self.colors[v] = c
                if self._assign(placed + 1, max(max_used, c)):
                    return True
                self.colors[v] = -1
            for u in trail:
                self.domain[u] |= bit
        return False


def is_k_colorable(g: Graph, k: int) -> Optional[Coloring]:
    if k < 0:
        raise StructuralError("k must be nonnegative")
    search = _KColoring(g, k)
    found = search.run()
    logger.debug(f"is_k_colorable(k={k}): {found is not None} in {search.nodes} nodes")
    return None if found is None else canonical(found)


def chromatic_number(g: Graph) -> Tuple[int, Coloring]:
    """Exact chromatic number with a colouring that attains it.

    The maximum clique gives the lower bound and DSATUR the first upper bound;
    k-colourings are then tried downward until one fails.
    """
    if g.n == 0:
        return 0, Coloring(colors=())
    lower = clique_number(g)
    best = dsatur_greedy(g)
    upper = best.palette_size
    logger.debug(f"chromatic_number: bounds [{lower}, {upper}] on {g!r}")
    k = upper - 1
    while k >= lower:
        found = is_k_colorable(g, k)
        if found is None:
            break
        best = found
        k = found.palette_size - 1
    return best.palette_size, best
