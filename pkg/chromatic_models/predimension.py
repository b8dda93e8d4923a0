"""
Predimension calculus: delta_alpha(F) = |F| - alpha * e(F) with alpha = p/q.

Every comparison is done on the integer q*|S| - p*e(S) so that ties, which
decide the difference between weak and strict closedness, are exact.
"""

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple, Union

from chromatic_models.coloring import Coloring, greedy_color_with_order
from chromatic_models.errors import ContractError, NotInClassError, StructuralError
from chromatic_models.graph_core import (
    Graph,
    VertexSet,
    bits,
    complete_graph,
    mask_of,
    members,
)
from chromatic_models.mycielski import iterated_mycielskian, mycielskian

logger = logging.getLogger(__name__)

# components up to this size are minimised by plain subset enumeration
ENUMERATION_LIMIT = 8


@dataclass(frozen=True)
class Alpha:
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))
        if not 0 <= self.value <= 1:
            raise StructuralError(f"alpha={self.value} outside [0, 1]")

    @classmethod
    def parse(cls, text: Union[str, Fraction, int]) -> "Alpha":
        try:
            return cls(Fraction(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise StructuralError(f"cannot parse alpha {text!r}") from exc

    @property
    def p(self) -> int:
        return self.value.numerator

    @property
    def q(self) -> int:
        return self.value.denominator

    def __str__(self) -> str:
        return str(self.value)


class Closedness(str, enum.Enum):
    WEAK = "weak"
    STRICT = "strict"


def delta(g: Graph, alpha: Alpha) -> Fraction:
    return g.n - alpha.value * g.edge_count()


def delta_of(g: Graph, s: Iterable[int], alpha: Alpha) -> Fraction:
    mask = mask_of(s)
    return mask.bit_count() - alpha.value * g.edges_within(mask)


# --- exact minimisation over extensions ---

_INF = float("inf")


def _bfs_order(rows: Tuple[int, ...], comp: int) -> List[int]:
    order: List[int] = []
    seen = 0
    for start in bits(comp):
        if (seen >> start) & 1:
            continue
        frontier = 1 << start
        seen |= frontier
        while frontier:
            v = (frontier & -frontier).bit_length() - 1
            frontier &= ~(1 << v)
            order.append(v)
            fresh = rows[v] & comp & ~seen
            seen |= fresh
            frontier |= fresh
    return order


def _components(rows: Tuple[int, ...], free: int) -> List[int]:
    comps = []
    left = free
    while left:
        comp = left & -left
        frontier = comp
        while frontier:
            v = (frontier & -frontier).bit_length() - 1
            frontier &= ~(1 << v)
            fresh = rows[v] & left & ~comp
            comp |= fresh
            frontier |= fresh
        comps.append(comp)
        left &= ~comp
    return comps


def _search_component(
    rows: Tuple[int, ...], base: int, comp: int, unit: int, pen: int, nonempty: bool
) -> Tuple[float, int]:
    """Minimise unit*|S| - pen*(e(S) + e(S, base)) over S inside one component."""
    order = _bfs_order(rows, comp)
    m = len(order)
    best = [_INF if nonempty else 0, 0]

    if m <= ENUMERATION_LIMIT:
        for pick in range(1, 1 << m):
            chosen = mask_of(order[i] for i in bits(pick))
            value = unit * chosen.bit_count() - pen * (
                sum((rows[v] & chosen).bit_count() for v in bits(chosen)) // 2
                + sum((rows[v] & base).bit_count() for v in bits(chosen))
            )
            if value < best[0]:
                best[0], best[1] = value, chosen
        return best[0], best[1]

    def bound(j: int, chosen: int) -> int:
        total = 0
        earlier = 0
        fixed = base | chosen
        for k in range(j, m):
            v = order[k]
            gain = unit - pen * (
                (rows[v] & fixed).bit_count() + (rows[v] & earlier).bit_count()
            )
            if gain < 0:
                total += gain
            earlier |= 1 << v
        return total

    def dfs(j: int, chosen: int, value: int) -> None:
        if j == m:
            if (chosen or not nonempty) and value < best[0]:
                best[0], best[1] = value, chosen
            return
        if value + bound(j, chosen) >= best[0]:
            return
        v = order[j]
        gain = unit - pen * (rows[v] & (base | chosen)).bit_count()
        dfs(j + 1, chosen | (1 << v), value + gain)
        dfs(j + 1, chosen, value)

    dfs(0, 0, 0)
    return best[0], best[1]


def _minimize(
    rows: Tuple[int, ...], base: int, free: int, unit: int, pen: int, nonempty: bool
) -> Tuple[float, int]:
    """Minimum of unit*|S| - pen*(e(S) + e(S, base)) over S within ``free``.

    Vertices that make every extension containing them strictly worse are
    peeled first; the rest splits into components whose optima add up. For
    the nonempty minimum a peeled vertex can only help as a singleton.
    """
    core = free
    peeled: List[int] = []
    changed = True
    while changed:
        changed = False
        for v in bits(core):
            if unit - pen * (rows[v] & (base | core)).bit_count() > 0:
                core &= ~(1 << v)
                peeled.append(v)
                changed = True

    parts = [
        (comp, _search_component(rows, base, comp, unit, pen, False))
        for comp in _components(rows, core)
    ]
    total = sum(value for _, (value, _) in parts)
    union = 0
    for _, (_, chosen) in parts:
        union |= chosen
    if not nonempty:
        return total, union

    best: Tuple[float, int] = (_INF, 0)
    for comp, (value, chosen) in parts:
        ne_value, ne_chosen = _search_component(rows, base, comp, unit, pen, True)
        cand = total - value + ne_value
        if cand < best[0]:
            best = (cand, (union & ~chosen) | ne_chosen)
    for v in peeled:
        single = unit - pen * (rows[v] & base).bit_count()
        if single < best[0]:
            best = (single, 1 << v)
    return best


def _check_subset(g: Graph, a: Iterable[int]) -> int:
    mask = mask_of(a)
    if mask & ~g.vertex_mask:
        raise StructuralError("vertex set outside the graph")
    return mask


# --- operations ---


def in_k_alpha(g: Graph, alpha: Alpha) -> Tuple[bool, Optional[VertexSet]]:
    """Membership in K_alpha; on failure a subset of minimum predimension."""
    value, chosen = _minimize(g.rows, 0, g.vertex_mask, alpha.q, alpha.p, False)
    if value >= 0:
        return True, None
    return False, members(chosen)


def is_closed(
    a: Iterable[int], b: Graph, alpha: Alpha, kind: Closedness
) -> Tuple[bool, Optional[VertexSet]]:
    """Whether ``a`` is closed in ``b``; on failure a superset C breaking it."""
    base = _check_subset(b, a)
    free = b.vertex_mask & ~base
    strict = Closedness(kind) is Closedness.STRICT
    value, chosen = _minimize(b.rows, base, free, alpha.q, alpha.p, strict)
    ok = value > 0 if strict else value >= 0
    if ok:
        return True, None
    return False, members(base | chosen)


def closure(a: Iterable[int], g: Graph, alpha: Alpha, kind: Closedness) -> VertexSet:
    """Smallest closed superset of ``a``: the least delta-minimiser for the weak
    relation, the greatest for the strict one."""
    base = _check_subset(g, a)
    free = g.vertex_mask & ~base
    scale = g.n + 1
    tie = 1 if Closedness(kind) is Closedness.WEAK else -1
    _, chosen = _minimize(
        g.rows, base, free, alpha.q * scale + tie, alpha.p * scale, False
    )
    return members(base | chosen)


def min_degree_vertex_below(g: Graph, k_star: int) -> Optional[int]:
    for v in range(g.n):
        if g.degree(v) < k_star:
            return v
    return None


def kstar_coloring(
    g: Graph, alpha: Alpha, k_star: int, check_membership: bool = False
) -> Coloring:
    """Colouring with at most k* colours for a member of K_alpha with alpha*k* > 2.

    Vertices of degree below k* are removed one by one and coloured greedily in
    reverse removal order.
    """
    if alpha.value * k_star <= 2:
        raise ContractError(f"need alpha * k* > 2, got {alpha} * {k_star}")
    if check_membership:
        ok, witness = in_k_alpha(g, alpha)
        if not ok:
            raise NotInClassError(f"graph is not in K_{alpha}", witness)
    left = g.vertex_mask
    removal: List[int] = []
    while left:
        for v in bits(left):
            if (g.rows[v] & left).bit_count() < k_star:
                removal.append(v)
                left &= ~(1 << v)
                break
        else:
            raise NotInClassError(
                f"every remaining vertex has degree >= {k_star}; "
                f"predimension is negative, so the graph is not in K_{alpha}",
                members(left),
            )
    coloring = greedy_color_with_order(g, removal)
    if coloring.palette_size > k_star:
        raise ContractError(f"greedy used {coloring.palette_size} > {k_star} colours")
    return coloring


def closedness_by_degree(a_sub: Iterable[int], a: Graph, alpha: Alpha) -> bool:
    """Strict closedness of ``a_sub`` in ``a`` under alpha * max_degree < 1."""
    if alpha.value * a.max_degree() >= 1:
        raise ContractError(
            f"need alpha < 1/max_degree, got alpha={alpha}, "
            f"max_degree={a.max_degree()}"
        )
    ok, _ = is_closed(a_sub, a, alpha, Closedness.STRICT)
    return ok


def mycielskian_threshold(a: Graph) -> Fraction:
    """1/max_degree of the Mycielskian of ``a``."""
    return Fraction(1, mycielskian(a).graph.max_degree())


def mycielskian_in_class(a: Graph, alpha: Alpha, kind: Closedness) -> bool:
    """Whether the Mycielskian of a member of K_alpha is again a member.

    Below the degree threshold the answer must be yes with ``a`` strictly closed
    in its Mycielskian; a contrary result raises ContractError.
    """
    if Closedness(kind) is Closedness.STRICT and alpha.value >= 1:
        raise ContractError("the strict relation needs alpha < 1")
    ok, witness = in_k_alpha(a, alpha)
    if not ok:
        raise NotInClassError(f"input graph is not in K_{alpha}", witness)
    lifted = mycielskian(a).graph
    verdict, _ = in_k_alpha(lifted, alpha)
    threshold = Fraction(1, lifted.max_degree())
    if alpha.value < threshold:
        if not (verdict and closedness_by_degree(range(a.n), lifted, alpha)):
            raise ContractError(
                f"alpha={alpha} is below 1/max_degree={threshold} "
                "but the Mycielskian breaks the degree bound"
            )
    logger.debug(f"mycielskian_in_class: threshold={threshold}, member={verdict}")
    return verdict


def lower_bound_epsilon(n: int) -> Tuple[Fraction, Graph]:
    """epsilon = 1/max_degree(W) for W the (n-2)-fold Mycielskian of K_2.

    Any rational 0 < alpha < epsilon puts W and all its subsets, strictly
    closed, into the class; W has chromatic number n.
    """
    if n < 1:
        raise StructuralError("n must be at least 1")
    if n == 1:
        return Fraction(1), complete_graph(1)
    witness = complete_graph(2)
    if n > 2:
        witness = iterated_mycielskian(witness, n - 2)[-1].graph
    return Fraction(1, witness.max_degree()), witness
