"""
Finite simple graphs on vertices 0..n-1 with one integer bit row per vertex.

Also holds the generators used throughout the package, free amalgamation
over an explicit pair of embeddings, and exhaustive isomorphism search for
small graphs.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from chromatic_models.errors import DegenerateInputError, StructuralError

logger = logging.getLogger(__name__)

VertexSet = FrozenSet[int]
Edge = Tuple[int, int]


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def members(mask: int) -> VertexSet:
    return frozenset(bits(mask))


def clique_in_mask(rows: Sequence[int], cand: int, m: int) -> bool:
    """True iff ``cand`` contains m pairwise adjacent vertices."""
    if m <= 0:
        return True
    if cand.bit_count() < m:
        return False
    if m == 1:
        return True
    for v in bits(cand):
        cand &= ~(1 << v)
        if clique_in_mask(rows, cand & rows[v], m - 1):
            return True
        if cand.bit_count() < m:
            return False
    return False


@dataclass(frozen=True)
class Graph:
    n: int
    rows: Tuple[int, ...]
    labels: Optional[Tuple[Any, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise StructuralError(f"negative vertex count {self.n}")
        if len(self.rows) != self.n:
            raise StructuralError(f"{len(self.rows)} rows for {self.n} vertices")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.rows):
            if row & ~full:
                raise StructuralError(f"row {v} points outside the vertex range")
            if (row >> v) & 1:
                raise StructuralError(f"loop at vertex {v}")
            for u in bits(row):
                if not (self.rows[u] >> v) & 1:
                    raise StructuralError(f"adjacency not symmetric at ({v}, {u})")
        if self.labels is not None and len(self.labels) != self.n:
            raise StructuralError(f"{len(self.labels)} labels for {self.n} vertices")

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[Sequence[int]], labels: Optional[Sequence] = None
    ) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise StructuralError(f"edge ({u}, {v}) outside 0..{n - 1}")
            if u == v:
                raise StructuralError(f"loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows), None if labels is None else tuple(labels))

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def adjacent(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def neighbors(self, v: int) -> List[int]:
        return list(bits(self.rows[v]))

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> List[int]:
        return [row.bit_count() for row in self.rows]

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def edge_count(self) -> int:
        return sum(self.degrees()) // 2

    def edges(self) -> List[Edge]:
        return [
            (u, v)
            for u in range(self.n)
            for v in bits(self.rows[u] & ~((1 << (u + 1)) - 1))
        ]

    def edges_within(self, mask: int) -> int:
        return sum((self.rows[v] & mask).bit_count() for v in bits(mask)) // 2

    def is_clique(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        return all(self.adjacent(u, v) for u, v in combinations(vs, 2))

    def is_independent(self, vertices: Iterable[int]) -> bool:
        mask = mask_of(vertices)
        return all(not (self.rows[v] & mask) for v in bits(mask))

    def has_triangle(self) -> bool:
        for u, v in self.edges():
            if self.rows[u] & self.rows[v]:
                return True
        return False

    def has_clique_of_size(self, m: int) -> bool:
        """True iff some m vertices are pairwise adjacent."""
        return clique_in_mask(self.rows, self.vertex_mask, m)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count()})"


@dataclass(frozen=True)
class Embedding:
    """Injective vertex map; ``mapping[v]`` is the image of source vertex v."""

    mapping: Tuple[int, ...]

    def __post_init__(self):
        if len(set(self.mapping)) != len(self.mapping):
            raise StructuralError("embedding is not injective")

    def __call__(self, v: int) -> int:
        return self.mapping[v]

    def image(self) -> VertexSet:
        return frozenset(self.mapping)

    def is_induced(self, source: Graph, target: Graph) -> bool:
        """Edges and non-edges are both preserved."""
        if len(self.mapping) != source.n:
            return False
        if any(not 0 <= w < target.n for w in self.mapping):
            return False
        return all(
            source.adjacent(u, v) == target.adjacent(self.mapping[u], self.mapping[v])
            for u, v in combinations(range(source.n), 2)
        )


@dataclass(frozen=True)
class Glue:
    """Two embeddings of one base A: vertex i of A is into_b[i] and into_c[i]."""

    into_b: Tuple[int, ...]
    into_c: Tuple[int, ...]

    def __post_init__(self):
        if len(self.into_b) != len(self.into_c):
            raise StructuralError("glue maps have different lengths")
        for side in (self.into_b, self.into_c):
            if len(set(side)) != len(side):
                raise StructuralError("glue map is not injective")

    @property
    def size(self) -> int:
        return len(self.into_b)

    def swapped(self) -> "Glue":
        return Glue(self.into_c, self.into_b)

    @classmethod
    def empty(cls) -> "Glue":
        return cls((), ())


@dataclass(frozen=True)
class Amalgam:
    """Result layout: B keeps its indices, C minus the glued part follows in order."""

    graph: Graph
    base: Graph
    other: Graph
    glue: Glue
    other_map: Tuple[int, ...]

    @property
    def new_vertices(self) -> VertexSet:
        return frozenset(range(self.base.n, self.graph.n))


def _check_glue(b: Graph, c: Graph, glue: Glue) -> None:
    for side, g in ((glue.into_b, b), (glue.into_c, c)):
        for v in side:
            if not 0 <= v < g.n:
                raise StructuralError(f"glue vertex {v} outside 0..{g.n - 1}")
    for i, j in combinations(range(glue.size), 2):
        in_b = b.adjacent(glue.into_b[i], glue.into_b[j])
        in_c = c.adjacent(glue.into_c[i], glue.into_c[j])
        if in_b != in_c:
            raise StructuralError(
                f"glue is not edge-preserving on base pair ({i}, {j})"
            )


def amalgamate(b: Graph, c: Graph, glue: Glue) -> Amalgam:
    """Free amalgam of B and C over the base named by ``glue``, with vertex maps."""
    _check_glue(b, c, glue)
    other_map = [-1] * c.n
    for i, v in enumerate(glue.into_c):
        other_map[v] = glue.into_b[i]
    nxt = b.n
    for v in range(c.n):
        if other_map[v] < 0:
            other_map[v] = nxt
            nxt += 1
    rows = list(b.rows) + [0] * (nxt - b.n)
    for u, v in c.edges():
        x, y = other_map[u], other_map[v]
        rows[x] |= 1 << y
        rows[y] |= 1 << x
    labels = None
    if b.labels is not None and c.labels is not None:
        glued = set(glue.into_c)
        labels = b.labels + tuple(c.labels[v] for v in range(c.n) if v not in glued)
    graph = Graph(nxt, tuple(rows), labels)
    return Amalgam(graph, b, c, glue, tuple(other_map))


def free_amalgam(b: Graph, c: Graph, glue: Glue) -> Graph:
    return amalgamate(b, c, glue).graph


def induced_subgraph(g: Graph, s: Iterable[int]) -> Graph:
    """Subgraph on ``s`` renumbered in increasing vertex order."""
    vs = sorted(set(s))
    for v in vs:
        if not 0 <= v < g.n:
            raise StructuralError(f"vertex {v} outside 0..{g.n - 1}")
    index = {v: i for i, v in enumerate(vs)}
    rows = []
    for v in vs:
        row = 0
        for u in bits(g.rows[v]):
            if u in index:
                row |= 1 << index[u]
        rows.append(row)
    labels = None if g.labels is None else tuple(g.labels[v] for v in vs)
    return Graph(len(vs), tuple(rows), labels)


def disjoint_union(g: Graph, h: Graph) -> Graph:
    return free_amalgam(g, h, Glue.empty())


# --- generators ---


def empty_graph() -> Graph:
    return Graph(0, ())


def edgeless_graph(n: int) -> Graph:
    return Graph(n, (0,) * n)


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise DegenerateInputError("complete graph needs n >= 1")
    full = (1 << n) - 1
    return Graph(n, tuple(full & ~(1 << v) for v in range(n)))


def complete_multipartite(class_sizes: Sequence[int]) -> Graph:
    """Classes occupy consecutive index blocks in the given order."""
    if not class_sizes:
        raise DegenerateInputError("complete multipartite graph needs a class")
    if any(s < 1 for s in class_sizes):
        raise StructuralError("class sizes must be positive")
    n = sum(class_sizes)
    full = (1 << n) - 1
    rows = []
    start = 0
    for size in class_sizes:
        block = ((1 << size) - 1) << start
        rows.extend([full & ~block] * size)
        start += size
    return Graph(n, tuple(rows))


def disjoint_clique_union(sizes: Sequence[int]) -> Graph:
    if not sizes:
        raise DegenerateInputError("disjoint clique union needs a block")
    if any(s < 1 for s in sizes):
        raise StructuralError("block sizes must be positive")
    rows = []
    start = 0
    for size in sizes:
        block = ((1 << size) - 1) << start
        rows.extend(block & ~(1 << (start + i)) for i in range(size))
        start += size
    return Graph(start, tuple(rows))


def half_graph(k: int) -> Graph:
    """a_1..a_k are vertices 0..k-1, b_1..b_k are k..2k-1; a_i ~ b_j iff i < j."""
    if k < 1:
        raise DegenerateInputError("half graph needs k >= 1")
    edges = [(i, k + j) for i in range(k) for j in range(k) if i < j]
    labels = [("a", i + 1) for i in range(k)] + [("b", j + 1) for j in range(k)]
    return Graph.from_edges(2 * k, edges, labels)


def shift_graph(n: int, k: int) -> Graph:
    """Increasing k-tuples over 1..n in lexicographic order; labels are the tuples."""
    if k < 2:
        raise StructuralError("shift graph needs k >= 2")
    if n < k:
        raise StructuralError(f"shift graph needs n >= k, got n={n}, k={k}")
    tuples = list(combinations(range(1, n + 1), k))
    index = {t: i for i, t in enumerate(tuples)}
    edges = []
    for t in tuples:
        for last in range(t[-1] + 1, n + 1):
            edges.append((index[t], index[t[1:] + (last,)]))
    return Graph.from_edges(len(tuples), edges, tuples)


def path_graph(n: int) -> Graph:
    if n < 1:
        raise DegenerateInputError("path needs at least one vertex")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise StructuralError("cycle needs at least three vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_extension(length: int) -> Graph:
    """Path with ``length`` edges whose two endpoints are vertices 0 and 1."""
    if length < 1:
        raise DegenerateInputError("path extension needs at least one edge")
    order = [0] + list(range(2, length + 1)) + [1]
    return Graph.from_edges(length + 1, list(zip(order, order[1:])))


# --- isomorphism ---


def _signature(colours: Sequence[int], row: int, v: int) -> Tuple:
    return colours[v], tuple(sorted(colours[u] for u in bits(row)))


def _refine(
    g: Graph, h: Graph, init_g: Sequence[int], init_h: Sequence[int]
) -> Tuple[List[int], List[int]]:
    """Joint colour refinement so that colours are comparable across g and h."""
    cg, ch = list(init_g), list(init_h)
    classes = len(set(cg) | set(ch))
    while True:
        sig_g = [_signature(cg, g.rows[v], v) for v in range(g.n)]
        sig_h = [_signature(ch, h.rows[v], v) for v in range(h.n)]
        palette = {s: i for i, s in enumerate(sorted(set(sig_g) | set(sig_h)))}
        cg = [palette[s] for s in sig_g]
        ch = [palette[s] for s in sig_h]
        if len(palette) == classes:
            return cg, ch
        classes = len(palette)


def _search(g: Graph, h: Graph, fixed: Mapping[int, int]) -> Optional[Embedding]:
    if g.n != h.n or g.edge_count() != h.edge_count():
        return None
    if sorted(g.degrees()) != sorted(h.degrees()):
        return None
    for u, w in fixed.items():
        if not (0 <= u < g.n and 0 <= w < h.n):
            raise StructuralError(f"partial map pair ({u}, {w}) out of range")
    if len(set(fixed.values())) != len(fixed):
        return None
    for (u1, w1), (u2, w2) in combinations(fixed.items(), 2):
        if g.adjacent(u1, u2) != h.adjacent(w1, w2):
            return None

    init_g = [0] * g.n
    init_h = [0] * h.n
    for i, (u, w) in enumerate(sorted(fixed.items()), start=1):
        init_g[u] = i
        init_h[w] = i
    cg, ch = _refine(g, h, init_g, init_h)
    if sorted(cg) != sorted(ch):
        return None

    by_colour: Dict[int, List[int]] = {}
    for w in range(h.n):
        by_colour.setdefault(ch[w], []).append(w)

    # place vertices with the most already-placed neighbours first
    order: List[int] = []
    placed = 0
    remaining = set(range(g.n)) - set(fixed)
    while remaining:
        v = min(
            remaining,
            key=lambda x: (
                -(g.rows[x] & placed).bit_count(),
                len(by_colour[cg[x]]),
                -g.degree(x),
                x,
            ),
        )
        order.append(v)
        remaining.discard(v)
        placed |= 1 << v

    mapping = [-1] * g.n
    used = 0
    for u, w in fixed.items():
        mapping[u] = w
        used |= 1 << w
    done = list(fixed)

    def dfs(pos: int) -> bool:
        nonlocal used
        if pos == len(order):
            return True
        v = order[pos]
        for w in by_colour[cg[v]]:
            if (used >> w) & 1:
                continue
            if any(g.adjacent(v, u) != h.adjacent(w, mapping[u]) for u in done):
                continue
            mapping[v] = w
            used |= 1 << w
            done.append(v)
            if dfs(pos + 1):
                return True
            done.pop()
            used &= ~(1 << w)
            mapping[v] = -1
        return False

    if dfs(0):
        return Embedding(tuple(mapping))
    return None


def find_isomorphism(g: Graph, h: Graph) -> Optional[Embedding]:
    """Exhaustive search with degree and colour-refinement pruning.

    Meant for graphs up to a dozen or so vertices; larger inputs are accepted
    but the search is exponential in the worst case.
    """
    return _search(g, h, {})


def extend_isomorphism(
    g: Graph, h: Graph, partial: Mapping[int, int]
) -> Optional[Embedding]:
    """Isomorphism g -> h agreeing with ``partial``, or None."""
    return _search(g, h, partial)
