"""
Finite instability witnesses for the edge relation: half graphs (order
property) and shattered independent sets (independence property).
"""

import logging
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from chromatic_models.graph_core import Graph, bits, mask_of

logger = logging.getLogger(__name__)


class HalfGraphWitness(BaseModel):
    """a_seq[i] ~ b_seq[j] exactly when i < j."""

    model_config = ConfigDict(frozen=True)

    a_seq: Tuple[int, ...] = ()
    b_seq: Tuple[int, ...] = ()

    @property
    def order(self) -> int:
        return len(self.a_seq)


class ShatterWitness(BaseModel):
    """Independent ``base`` plus, for every subset X of it, a vertex whose
    neighbours in ``base`` are exactly X."""

    model_config = ConfigDict(frozen=True)

    base: Tuple[int, ...] = ()
    realizers: List[Tuple[Tuple[int, ...], int]] = []

    @property
    def size(self) -> int:
        return len(self.base)


def verify_half_graph(g: Graph, w: HalfGraphWitness) -> bool:
    k = len(w.a_seq)
    if len(w.b_seq) != k:
        return False
    verts = w.a_seq + w.b_seq
    if len(set(verts)) != len(verts) or any(not 0 <= v < g.n for v in verts):
        return False
    return all(
        g.adjacent(w.a_seq[i], w.b_seq[j]) == (i < j)
        for i in range(k)
        for j in range(k)
    )


def verify_shatter(g: Graph, w: ShatterWitness) -> bool:
    if len(set(w.base)) != len(w.base) or any(not 0 <= v < g.n for v in w.base):
        return False
    if not g.is_independent(w.base):
        return False
    subsets = {frozenset(x) for x, _ in w.realizers}
    if len(subsets) != 1 << len(w.base) or len(w.realizers) != len(subsets):
        return False
    base_mask = mask_of(w.base)
    for subset, v in w.realizers:
        if not 0 <= v < g.n or not set(subset) <= set(w.base):
            return False
        if g.rows[v] & base_mask != mask_of(subset):
            return False
    return True


def _half_graph_of_order(g: Graph, k: int) -> Optional[HalfGraphWitness]:
    """Lockstep backtracking a_1, b_1, a_2, b_2, ... with bitset candidates."""
    rows = g.rows
    degree = g.degrees()
    a_seq: List[int] = []
    b_seq: List[int] = []

    def place(used: int, not_b: int, all_a: int) -> bool:
        # not_b: vertices adjacent to some chosen b; all_a: common neighbours of
        # the chosen a's (every later b must lie there)
        i = len(b_seq)
        if i == k:
            return True
        left = k - i
        a_pool = g.vertex_mask & ~used & ~not_b
        if a_pool.bit_count() < left or (all_a & ~used).bit_count() < left:
            return False
        for a in bits(a_pool):
            if degree[a] < k - i - 1:
                continue
            b_pool = all_a & ~used & ~rows[a] & ~(1 << a)
            for b in bits(b_pool):
                if degree[b] < i:
                    continue
                a_seq.append(a)
                b_seq.append(b)
                if place(
                    used | (1 << a) | (1 << b), not_b | rows[b], all_a & rows[a]
                ):
                    return True
                a_seq.pop()
                b_seq.pop()
        return False

    if place(0, 0, g.vertex_mask):
        return HalfGraphWitness(a_seq=tuple(a_seq), b_seq=tuple(b_seq))
    return None


def max_half_graph(g: Graph, k_cap: int) -> Tuple[int, HalfGraphWitness]:
    """Largest k <= k_cap with a half graph of order k in ``g``.

    Orders are tried upward; dropping a_1 and b_1 from an order-k witness
    leaves one of order k-1, so the first failure ends the search.
    """
    best = HalfGraphWitness()
    for k in range(1, k_cap + 1):
        found = _half_graph_of_order(g, k)
        if found is None:
            break
        if not verify_half_graph(g, found):
            raise AssertionError(f"half graph search returned a bad witness {found}")
        best = found
    logger.debug(f"max_half_graph: order {best.order} (cap {k_cap})")
    return best.order, best


def _shattered(g: Graph, s: int) -> Optional[ShatterWitness]:
    rows = g.rows
    need = 1 << (s - 1) if s else 0
    pool = [v for v in range(g.n) if g.degree(v) >= need]
    for base in combinations(pool, s):
        if not g.is_independent(base):
            continue
        base_mask = mask_of(base)
        seen: Dict[int, int] = {}
        for v in range(g.n):
            seen.setdefault(rows[v] & base_mask, v)
        if len(seen) == 1 << s:
            realizers = [
                (tuple(bits(pattern)), seen[pattern]) for pattern in sorted(seen)
            ]
            return ShatterWitness(base=base, realizers=realizers)
    return None


def max_shattered_set(g: Graph, k_cap: int) -> Tuple[int, ShatterWitness]:
    """Largest independent set of size <= k_cap cut out in every way by single
    neighbourhoods. Shattering is inherited by subsets, so sizes go upward."""
    best = ShatterWitness(realizers=[((), 0)] if g.n else [])
    for s in range(1, k_cap + 1):
        found = _shattered(g, s)
        if found is None:
            break
        if not verify_shatter(g, found):
            raise AssertionError(f"shatter search returned a bad witness {found}")
        best = found
    logger.debug(f"max_shattered_set: size {best.size} (cap {k_cap})")
    return best.size, best
