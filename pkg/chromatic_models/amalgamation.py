"""
Amalgamation classes and finite approximants of their limits.

Approximants are grown by realizing extension axioms: an anchor A inside the
current graph together with a one- or multi-point extension B of A that the
graph does not yet embed over A. ``audit_extension_axioms`` lists the axioms
still missing at a given size; growth stops when that list is empty.
"""

import enum
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel

from chromatic_models import rng
from chromatic_models.coloring import chromatic_number, clique_number
from chromatic_models.config import get_settings
from chromatic_models.errors import ContractError, NotInClassError, StructuralError
from chromatic_models.graph_core import (
    Embedding,
    Glue,
    Graph,
    amalgamate,
    bits,
    clique_in_mask,
    empty_graph,
    extend_isomorphism,
    induced_subgraph,
    mask_of,
    path_extension,
)
from chromatic_models.predimension import (
    Alpha,
    Closedness,
    in_k_alpha,
    is_closed,
)
from chromatic_models.witnesses import max_half_graph

logger = logging.getLogger(__name__)


class ClassKind(str, enum.Enum):
    ALL = "all"
    KM_FREE = "km_free"
    K_ALPHA = "k_alpha"


@dataclass(frozen=True)
class ClassDescriptor:
    name: str
    kind: ClassKind
    m: Optional[int] = None
    alpha: Optional[Alpha] = None
    closedness: Closedness = Closedness.WEAK

    @classmethod
    def all_graphs(cls) -> "ClassDescriptor":
        return cls("all", ClassKind.ALL)

    @classmethod
    def km_free(cls, m: int) -> "ClassDescriptor":
        if m < 3:
            raise ContractError("K_m-free classes need m >= 3 to contain an edge")
        name = "trianglefree" if m == 3 else f"k{m}free"
        return cls(name, ClassKind.KM_FREE, m=m)

    @classmethod
    def triangle_free(cls) -> "ClassDescriptor":
        return cls.km_free(3)

    @classmethod
    def k_alpha(cls, alpha: Alpha, kind: Closedness = Closedness.WEAK):
        kind = Closedness(kind)
        if kind is Closedness.STRICT and alpha.value >= 1:
            raise ContractError("the strict relation needs alpha < 1")
        return cls(
            f"kalpha({alpha},{kind.value})",
            ClassKind.K_ALPHA,
            alpha=alpha,
            closedness=kind,
        )

    @classmethod
    def from_name(
        cls, name: str, alpha: Optional[Alpha] = None, strict: bool = False
    ) -> "ClassDescriptor":
        key = name.lower().replace("-", "").replace("_", "")
        if key in ("all", "allgraphs", "random"):
            return cls.all_graphs()
        if key == "trianglefree":
            return cls.triangle_free()
        found = re.fullmatch(r"k(\d+)free", key)
        if found:
            return cls.km_free(int(found.group(1)))
        if key in ("kalpha", "predimension"):
            if alpha is None:
                raise ContractError("class kalpha needs --alpha")
            return cls.k_alpha(alpha, Closedness.STRICT if strict else Closedness.WEAK)
        raise ContractError(f"unknown class {name!r}")

    @property
    def is_predimension(self) -> bool:
        return self.kind is ClassKind.K_ALPHA

    @property
    def default_completion(self) -> Fraction:
        # K_m-free classes add every edge the class allows, in random order
        if self.kind is ClassKind.ALL:
            return Fraction(1, 2)
        if self.kind is ClassKind.KM_FREE:
            return Fraction(1)
        return Fraction(0)

    def contains(self, g: Graph) -> bool:
        if self.kind is ClassKind.ALL:
            return True
        if self.kind is ClassKind.KM_FREE:
            return not g.has_clique_of_size(self.m)
        return in_k_alpha(g, self.alpha)[0]

    def violation(self, g: Graph) -> frozenset:
        """Some vertex set showing ``g`` is outside the class (empty if none)."""
        if self.kind is ClassKind.K_ALPHA:
            ok, witness = in_k_alpha(g, self.alpha)
            return frozenset() if ok else witness
        if self.kind is ClassKind.KM_FREE:
            for combo in combinations(range(g.n), self.m):
                if g.is_clique(combo):
                    return frozenset(combo)
        return frozenset()

    def edge_allowed(self, rows: Sequence[int], v: int, x: int) -> bool:
        """Whether adding v-x keeps a class member inside the class."""
        if self.kind is ClassKind.KM_FREE:
            return not clique_in_mask(rows, rows[v] & rows[x], self.m - 2)
        return self.kind is ClassKind.ALL

    def pattern_allowed(self, rows: Sequence[int], neighbours: int) -> bool:
        """Whether a new vertex joined to ``neighbours`` stays in the class."""
        if self.kind is ClassKind.KM_FREE:
            return not clique_in_mask(rows, neighbours, self.m - 1)
        return True

    def is_strong(self, a: Iterable[int], g: Graph) -> bool:
        if not self.is_predimension:
            return True
        return is_closed(a, g, self.alpha, self.closedness)[0]

    def validate(self, samples: int = 40, seed: int = 0, max_n: int = 7) -> None:
        """Nontriviality plus sampled heredity; raises ContractError on failure."""
        if not self.contains(Graph.from_edges(2, [(0, 1)])):
            raise ContractError(f"class {self.name} contains no graph with an edge")
        gen = rng.stream(seed, rng.SAMPLING)
        for _ in range(samples):
            n = int(gen.integers(1, max_n + 1))
            edges = [
                (u, v) for u, v in combinations(range(n), 2) if gen.integers(0, 2)
            ]
            g = Graph.from_edges(n, edges)
            if not self.contains(g):
                continue
            keep = [v for v in range(n) if gen.integers(0, 2)]
            if not self.contains(induced_subgraph(g, keep)):
                raise ContractError(f"class {self.name} is not hereditary")

    def __str__(self) -> str:
        return self.name


# --- extension axioms ---


@dataclass(frozen=True)
class Extension:
    """B over A: ``attach[i]`` holds the anchor positions joined to new vertex i,
    ``inner[i]`` the new vertices joined to it."""

    anchor: Tuple[int, ...]
    attach: Tuple[int, ...]
    inner: Tuple[int, ...]

    @property
    def new_count(self) -> int:
        return len(self.attach)

    @property
    def size(self) -> int:
        return len(self.anchor) + len(self.attach)

    def describe(self) -> str:
        parts = []
        for i, att in enumerate(self.attach):
            nbrs = [self.anchor[j] for j in bits(att)]
            inner = list(bits(self.inner[i]))
            parts.append(f"x{i}~{nbrs}" + (f"+x{inner}" if inner else ""))
        return f"A={list(self.anchor)} " + " ".join(parts)


@dataclass(frozen=True)
class ExtensionRequest:
    """Explicit extension: B glued to the growing graph along ``over`` -> ``anchor``."""

    b: Graph
    over: Tuple[int, ...] = ()
    anchor: Tuple[int, ...] = ()
    label: str = "explicit"


def odd_cycle_path_requests(
    odd_length: int = 5, even_length: int = 6, offset: int = 0
) -> List[ExtensionRequest]:
    """An odd path over the empty set, then an even path over its two ends.

    Together they close an odd cycle of length ``odd_length + even_length``.
    ``offset`` is the size of the graph the requests are applied to.
    """
    if odd_length % 2 != 1 or even_length % 2 != 0:
        raise StructuralError("need an odd first path and an even second path")
    first = ExtensionRequest(path_extension(odd_length), label=f"path({odd_length})")
    second = ExtensionRequest(
        path_extension(even_length),
        over=(0, 1),
        anchor=(offset, offset + 1),
        label=f"path({even_length}) over ends",
    )
    return [first, second]


def _anchor_rows(g: Graph, anchor: Sequence[int]) -> Tuple[int, ...]:
    index = {v: i for i, v in enumerate(anchor)}
    return tuple(
        mask_of(index[u] for u in bits(g.rows[v]) if u in index) for v in anchor
    )


def _b_graph(base_rows: Tuple[int, ...], attach: Sequence[int], inner: Sequence[int]):
    a = len(base_rows)
    rows = list(base_rows) + [0] * len(attach)
    for i, att in enumerate(attach):
        rows[a + i] |= att | (inner[i] << a)
        for j in bits(att):
            rows[j] |= 1 << (a + i)
    return Graph(a + len(attach), tuple(rows))


def _canonical(attach: Sequence[int], inner: Sequence[int]) -> Tuple[tuple, tuple]:
    best = None
    for perm in permutations(range(len(attach))):
        pos = {old: i for i, old in enumerate(perm)}
        key = (
            tuple(attach[old] for old in perm),
            tuple(mask_of(pos[u] for u in bits(inner[old])) for old in perm),
        )
        if best is None or key < best:
            best = key
    return best


@lru_cache(maxsize=4096)
def _types(
    base_rows: Tuple[int, ...], t: int, d: ClassDescriptor
) -> Tuple[Tuple[tuple, tuple], ...]:
    """Extension types with t new vertices over a base, one per isomorphism type."""
    a = len(base_rows)
    pairs = list(combinations(range(t), 2))
    seen = set()
    out = []
    for attach in product(range(1 << a), repeat=t):
        for emask in range(1 << len(pairs)):
            inner = [0] * t
            for idx, (i, j) in enumerate(pairs):
                if (emask >> idx) & 1:
                    inner[i] |= 1 << j
                    inner[j] |= 1 << i
            key = _canonical(attach, inner)
            if key in seen:
                continue
            seen.add(key)
            b = _b_graph(base_rows, *key)
            if not d.contains(b):
                continue
            if d.is_predimension and not d.is_strong(range(a), b):
                continue
            out.append(key)
    return tuple(out)


def _to_graph_mask(anchor: Sequence[int], local: int) -> int:
    return mask_of(anchor[j] for j in bits(local))


def _embeds_over(g: Graph, d: ClassDescriptor, ext: Extension) -> Optional[Tuple]:
    """Images of the new vertices of ``ext`` in ``g`` (closed image for
    predimension classes), or None."""
    amask = mask_of(ext.anchor)
    wanted = [_to_graph_mask(ext.anchor, att) for att in ext.attach]
    cands = [0] * ext.new_count
    for x in bits(g.vertex_mask & ~amask):
        pattern = g.rows[x] & amask
        for i, w in enumerate(wanted):
            if pattern == w:
                cands[i] |= 1 << x
    chosen: List[int] = []

    def dfs(i: int, used: int) -> bool:
        if i == ext.new_count:
            return d.is_strong(ext.anchor + tuple(chosen), g)
        for x in bits(cands[i] & ~used):
            if all(
                g.adjacent(x, chosen[j]) == bool((ext.inner[i] >> j) & 1)
                for j in range(i)
            ):
                chosen.append(x)
                if dfs(i + 1, used | (1 << x)):
                    return True
                chosen.pop()
        return False

    return tuple(chosen) if dfs(0, 0) else None


def _one_point_missing(g: Graph, d: ClassDescriptor, limit: int) -> List[Extension]:
    """Missing one-point extensions over every anchor of size <= limit.

    Anchors are visited in lexicographic order; the vertex masks of every
    neighbourhood pattern are refined one anchor vertex at a time.
    """
    rows = g.rows
    missing: List[Extension] = []

    def visit(anchor: Tuple[int, ...], amask: int, masks: Dict[int, int]) -> None:
        for p in range(1 << len(anchor)):
            if masks.get(p, 0) & ~amask:
                continue
            if d.pattern_allowed(rows, _to_graph_mask(anchor, p)):
                missing.append(Extension(anchor, (p,), (0,)))
        if len(anchor) == limit:
            return
        pos = 1 << len(anchor)
        for c in range(anchor[-1] + 1 if anchor else 0, g.n):
            refined: Dict[int, int] = {}
            for p, m in masks.items():
                hi = m & rows[c]
                lo = m & ~rows[c]
                if hi:
                    refined[p | pos] = hi
                if lo:
                    refined[p] = lo
            visit(anchor + (c,), amask | (1 << c), refined)

    visit((), 0, {0: g.vertex_mask})
    return missing


def audit_extension_axioms(
    g: Graph,
    d: ClassDescriptor,
    a_max: int,
    b_max: int,
    exhaustive: bool = False,
) -> List[Extension]:
    """Extension axioms with |A| <= a_max and |B| <= b_max that ``g`` misses.

    For classes without a closure notion and a_max >= b_max - 1 every
    multi-point axiom follows from the one-point axioms over anchors of size
    < b_max, so only those are enumerated (unless ``exhaustive``); the list is
    empty exactly when the full list would be.
    """
    if a_max > b_max:
        raise StructuralError("need a_max <= b_max")
    if not d.is_predimension and a_max >= b_max - 1 and not exhaustive:
        return _one_point_missing(g, d, min(a_max, b_max - 1))
    missing: List[Extension] = []
    for a in range(0, min(a_max, b_max - 1) + 1):
        for anchor in combinations(range(g.n), a):
            if not d.is_strong(anchor, g):
                continue
            base_rows = _anchor_rows(g, anchor)
            for t in range(1, b_max - a + 1):
                for attach, inner in _types(base_rows, t, d):
                    ext = Extension(anchor, attach, inner)
                    if _embeds_over(g, d, ext) is None:
                        missing.append(ext)
    return missing


# --- growth ---


class GrowthStep(BaseModel):
    step: int
    description: str
    size: int
    edges: int
    chi: Optional[int] = None
    omega: int
    half_order: Optional[int] = None


class GrowthLog(BaseModel):
    seed: int
    class_name: str
    saturated: bool = False
    note: Optional[str] = None
    steps: List[GrowthStep] = []

    def to_frame(self) -> pd.DataFrame:
        columns = ["step", "size", "edges", "chi", "omega"]
        frame = pd.DataFrame([s.model_dump() for s in self.steps])
        if frame.empty:
            return pd.DataFrame(columns=columns)
        return frame[columns].astype({"chi": "Int64"})


class _Recorder:
    """Appends log rows, keeping omega current from the cliques through new
    vertices."""

    def __init__(self, log: GrowthLog, chi_limit: int, half_cap: int):
        self.log = log
        self.chi_limit = chi_limit
        self.half_cap = half_cap
        self.omega = 0

    def record(self, g: Graph, step: int, description: str, new: Iterable[int]):
        for v in new:
            through = 1 + clique_number(induced_subgraph(g, g.neighbors(v)))
            self.omega = max(self.omega, through)
        chi = chromatic_number(g)[0] if g.n <= self.chi_limit else None
        half = max_half_graph(g, self.half_cap)[0] if self.half_cap else None
        self.log.steps.append(
            GrowthStep(
                step=step,
                description=description,
                size=g.n,
                edges=g.edge_count(),
                chi=chi,
                omega=self.omega,
                half_order=half,
            )
        )
        logger.debug(f"step {step}: {description} -> {g!r}")


def _complete(
    graph: Graph, d: ClassDescriptor, anchor: Sequence[int], old_n: int, p, gen
) -> Graph:
    """Random edges between the new vertices and the old ones outside the anchor,
    each kept only while the class allows it."""
    rows = list(graph.rows)
    amask = mask_of(anchor)
    others = [x for x in range(old_n) if not (amask >> x) & 1]
    for v in range(old_n, graph.n):
        for x in rng.shuffled(gen, others):
            if rng.bernoulli(gen, p) and d.edge_allowed(rows, v, x):
                rows[v] |= 1 << x
                rows[x] |= 1 << v
    return Graph(graph.n, tuple(rows))


def _check_step(d: ClassDescriptor, before: Graph, after: Graph, image) -> None:
    """Closed classes: the old graph and the image of B stay closed, which with
    the old graph in the class keeps the new one in it. Others: membership."""
    if d.is_predimension:
        if not d.is_strong(range(before.n), after):
            raise ContractError("growth step left the previous graph unclosed")
        if not d.is_strong(image, after):
            raise ContractError("growth step left the realized extension unclosed")
    elif not d.contains(after):
        raise ContractError(f"growth step left class {d.name}")


def realize_extension(
    g: Graph, d: ClassDescriptor, ext: Extension, p: Fraction = Fraction(0), gen=None
) -> Tuple[Graph, Tuple[int, ...]]:
    """Free amalgam of B with ``g`` over the anchor, then the random completion
    (Fraisse classes only). Returns the new graph and the image of B."""
    b = _b_graph(_anchor_rows(g, ext.anchor), ext.attach, ext.inner)
    amal = amalgamate(g, b, Glue(ext.anchor, tuple(range(len(ext.anchor)))))
    graph = amal.graph
    if not d.is_predimension and p > 0:
        if gen is None:
            raise StructuralError("random completion needs a generator")
        graph = _complete(graph, d, ext.anchor, g.n, p, gen)
    return graph, ext.anchor + tuple(range(g.n, graph.n))


def _apply_request(g: Graph, d: ClassDescriptor, req: ExtensionRequest) -> Graph:
    if len(req.over) != len(req.anchor):
        raise StructuralError("request anchor and base differ in size")
    if not d.contains(req.b):
        raise NotInClassError(
            f"requested extension is not in {d.name}", d.violation(req.b)
        )
    if not d.is_strong(req.over, req.b):
        raise ContractError("requested base is not closed in its extension")
    if not d.is_strong(req.anchor, g):
        raise ContractError("requested anchor is not closed in the graph")
    amal = amalgamate(g, req.b, Glue(req.anchor, req.over))
    image = tuple(amal.other_map)
    _check_step(d, g, amal.graph, image)
    return amal.graph


def grow_generic(
    d: ClassDescriptor,
    budget: int,
    size_cap: int,
    rng_seed: int,
    initial: Optional[Graph] = None,
    extensions: Sequence[ExtensionRequest] = (),
    completion: Optional[Fraction] = None,
    chi_limit: Optional[int] = None,
    half_cap: int = 0,
) -> Tuple[Graph, GrowthLog]:
    """Grow an approximant of the limit of ``d``.

    Explicit ``extensions`` are realized first. After that each round audits
    the axioms with |B| <= size_cap and realizes the missing ones, smallest B
    first and in seeded random order within a size, re-checking each one
    before realizing it. Growth stops when a round finds nothing missing
    (``log.saturated``) or ``budget`` steps have been taken.
    """
    if budget <= 0 or size_cap <= 0:
        raise StructuralError("budget and size cap must be positive")
    settings = get_settings()
    if completion is None:
        completion = settings.completion_probability
    if completion is None:
        completion = d.default_completion
    if chi_limit is None:
        chi_limit = settings.chi_size_limit

    g = initial if initial is not None else empty_graph()
    if not d.contains(g):
        raise NotInClassError(f"initial graph is not in {d.name}", d.violation(g))
    log = GrowthLog(seed=rng_seed, class_name=d.name)
    recorder = _Recorder(log, chi_limit, half_cap)
    recorder.record(g, 0, "start", range(g.n))

    step = 0
    for req in extensions:
        before = g.n
        g = _apply_request(g, d, req)
        step += 1
        recorder.record(g, step, req.label, range(before, g.n))

    a_max, b_max = size_cap - 1, size_cap
    rnd = 0
    while step < budget:
        pending = audit_extension_axioms(g, d, a_max, b_max)
        if not pending:
            log.saturated = True
            break
        gen = rng.stream(rng_seed, rng.SCHEDULE, rnd)
        schedule: List[Extension] = []
        for size in sorted({e.size for e in pending}):
            schedule.extend(rng.shuffled(gen, [e for e in pending if e.size == size]))
        logger.info(f"round {rnd}: {len(pending)} pending on {g!r}")
        for ext in schedule:
            if step >= budget:
                break
            if _embeds_over(g, d, ext) is not None:
                continue
            step += 1
            before = g
            g, image = realize_extension(
                g, d, ext, completion, rng.stream(rng_seed, rng.COMPLETION, step)
            )
            _check_step(d, before, g, image)
            recorder.record(g, step, ext.describe(), range(before.n, g.n))
        rnd += 1

    if log.saturated and step == len(extensions):
        log.note = "no pending extensions"
    elif not log.saturated:
        log.note = "budget exhausted"
    logger.info(
        f"grow_generic({d.name}): {g!r}, steps={step}, saturated={log.saturated}"
    )
    return g, log


def embed_target(
    g: Graph, d: ClassDescriptor, target: Graph
) -> Tuple[Graph, Embedding]:
    """Extend ``g`` until ``target`` embeds; returns the graph and the embedding.

    Fraisse classes place the target one vertex at a time, reusing a vertex
    of ``g`` with the right neighbourhood when one exists. Predimension classes
    add the target over the empty set, which is closed in both.
    """
    if not d.contains(target):
        raise NotInClassError(f"target is not in {d.name}", d.violation(target))
    if d.is_predimension:
        if not d.is_strong((), target):
            raise ContractError("the empty set is not closed in the target")
        amal = amalgamate(g, target, Glue.empty())
        emb = Embedding(amal.other_map)
        if not d.is_strong(emb.mapping, amal.graph):
            raise ContractError("embedded target is not closed")
        return amal.graph, emb

    image: List[int] = []
    for i in range(target.n):
        anchor = tuple(sorted(image))
        want = mask_of(image[j] for j in range(i) if target.adjacent(i, j))
        amask = mask_of(image)
        found = next(
            (x for x in bits(g.vertex_mask & ~amask) if g.rows[x] & amask == want),
            None,
        )
        if found is None:
            local = mask_of(anchor.index(w) for w in bits(want))
            g, new = realize_extension(g, d, Extension(anchor, (local,), (0,)))
            found = new[-1]
        image.append(found)
    emb = Embedding(tuple(image))
    if not emb.is_induced(target, g):
        raise ContractError("target embedding is not induced")
    return g, emb


def has_fap_instance(d: ClassDescriptor, b: Graph, c: Graph, glue: Glue) -> bool:
    """Whether the free amalgam of b and c over the glued base stays in the class
    (with b and c closed in it for predimension classes)."""
    for name, h in (("b", b), ("c", c)):
        if not d.contains(h):
            raise NotInClassError(f"{name} is not in {d.name}", d.violation(h))
    if not d.is_strong(glue.into_b, b) or not d.is_strong(glue.into_c, c):
        raise ContractError("the base is not closed in both graphs")
    amal = amalgamate(b, c, glue)
    if not d.contains(amal.graph):
        return False
    if d.is_predimension:
        return d.is_strong(range(b.n), amal.graph) and d.is_strong(
            amal.other_map, amal.graph
        )
    return True


def has_jep_instance(d: ClassDescriptor, b: Graph, c: Graph) -> bool:
    return has_fap_instance(d, b, c, Glue.empty())


# --- homogeneity ---


def check_homogeneity(
    g: Graph, k: int
) -> Tuple[bool, Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]]:
    """Truncation check: every isomorphism between induced subgraphs on at most
    k vertices extends to an automorphism.

    Tuples are grouped into orbits of the automorphisms found so far; only
    pairs in different orbits need a fresh search. Returns the first pair of
    tuples whose partial isomorphism does not extend.
    """
    if k < 0 or k > g.n:
        raise StructuralError(f"need 0 <= k <= {g.n}")
    tuples = [t for size in range(1, k + 1) for t in permutations(range(g.n), size)]
    parent = {t: t for t in tuples}

    def find(t):
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    def add_generator(sigma: Sequence[int]) -> None:
        for t in tuples:
            image = tuple(sigma[v] for v in t)
            ra, rb = find(t), find(image)
            if ra != rb:
                parent[ra] = rb

    def pattern(t):
        return tuple(g.adjacent(u, v) for u, v in combinations(t, 2))

    by_pattern: Dict[Tuple[int, tuple], List[tuple]] = {}
    for t in tuples:
        by_pattern.setdefault((len(t), pattern(t)), []).append(t)

    generators = 0
    for size in range(1, k + 1):
        for a in combinations(range(g.n), size):
            for b in by_pattern[(size, pattern(a))]:
                if find(a) == find(b):
                    continue
                sigma = extend_isomorphism(g, g, dict(zip(a, b)))
                if sigma is None:
                    return False, (a, b)
                generators += 1
                add_generator(sigma.mapping)
    logger.debug(f"check_homogeneity(k={k}): {generators} automorphisms used")
    return True, None
