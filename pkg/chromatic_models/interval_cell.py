"""
Clique-or-colouring analysis of graphs on an interval whose (directed) edges
form one cell

    C = {<x, y> : d0 < x < e0, f(x) < y < g(x)},   g(x) <= x,

with f and g piecewise-linear over the rationals. ``analyze_cell`` returns a
verdict that either builds cliques of any requested size or colours every
vertex with a bounded palette; both kinds of certificate are checked against
``CellSpec.adjacent`` before they leave this module.
"""

import bisect
import logging
from fractions import Fraction
from typing import Annotated, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    model_validator,
)

from chromatic_models.config import get_settings
from chromatic_models.errors import (
    CellSpecError,
    ContractError,
    ResourceError,
    StructuralError,
)
from chromatic_models.graph_core import Graph

logger = logging.getLogger(__name__)


def to_fraction(value) -> Fraction:
    """Exact rational from an int, a Fraction or a "p/q" / decimal string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, float):
        return Fraction(str(value))
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {value!r}") from exc


Rational = Annotated[
    Fraction,
    BeforeValidator(to_fraction),
    PlainSerializer(str, return_type=str, when_used="json"),
]

_MODEL_CONFIG = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class PLFunction(BaseModel):
    """Continuous piecewise-linear function on [breakpoints[0], breakpoints[-1]]."""

    model_config = _MODEL_CONFIG

    breakpoints: Tuple[Rational, ...]
    values: Tuple[Rational, ...]

    @model_validator(mode="after")
    def _shape(self) -> "PLFunction":
        if len(self.breakpoints) < 2 or len(self.breakpoints) != len(self.values):
            raise ValueError("need at least two breakpoints, one value each")
        if any(a >= b for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        steps = {(b > a) - (b < a) for a, b in zip(self.values, self.values[1:])}
        if len(steps) != 1:
            raise ValueError("function must be strictly monotone or constant")
        return self

    @classmethod
    def linear(cls, slope, intercept, lo, hi) -> "PLFunction":
        slope, intercept = to_fraction(slope), to_fraction(intercept)
        lo, hi = to_fraction(lo), to_fraction(hi)
        values = (slope * lo + intercept, slope * hi + intercept)
        return cls(breakpoints=(lo, hi), values=values)

    @classmethod
    def constant(cls, value, lo, hi) -> "PLFunction":
        return cls.linear(0, value, lo, hi)

    @property
    def lo(self) -> Fraction:
        return self.breakpoints[0]

    @property
    def hi(self) -> Fraction:
        return self.breakpoints[-1]

    @property
    def shape(self) -> str:
        first, second = self.values[0], self.values[1]
        if second > first:
            return "increasing"
        return "decreasing" if second < first else "constant"

    def __call__(self, x) -> Fraction:
        x = to_fraction(x)
        if not self.lo <= x <= self.hi:
            raise CellSpecError("point outside the function's domain", x)
        i = bisect.bisect_right(self.breakpoints, x) - 1
        if i == len(self.breakpoints) - 1:
            return self.values[-1]
        x0, x1 = self.breakpoints[i], self.breakpoints[i + 1]
        y0, y1 = self.values[i], self.values[i + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def solve(self, level: Fraction) -> Optional[Fraction]:
        """The x with f(x) = level for a strictly monotone f (None if no such x)."""
        if self.shape == "constant":
            return None
        xs, ys = self.breakpoints, self.values
        for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:]):
            if min(y0, y1) <= level <= max(y0, y1):
                return x0 + (level - y0) * (x1 - x0) / (y1 - y0)
        return None

    def max_on(self, lo: Fraction, hi: Fraction) -> Fraction:
        inner = [x for x in self.breakpoints if lo < x < hi]
        return max(self(x) for x in [lo, hi] + inner)


class CellSpec(BaseModel):
    """One (1,1)-cell of edges on the vertex interval (d, e); ``d`` and ``e``
    default to minus and plus infinity."""

    model_config = _MODEL_CONFIG

    d0: Rational
    e0: Rational
    f: PLFunction
    g: PLFunction
    d: Optional[Rational] = None
    e: Optional[Rational] = None

    def in_vertex_interval(self, u: Fraction) -> bool:
        return (self.d is None or self.d < u) and (self.e is None or u < self.e)

    def adjacent(self, u, v) -> bool:
        """The literal edge predicate, symmetrized over the ordered pair."""
        u, v = to_fraction(u), to_fraction(v)
        if u == v or not (self.in_vertex_interval(u) and self.in_vertex_interval(v)):
            return False
        hi, lo = max(u, v), min(u, v)
        if not self.d0 < hi < self.e0:
            return False
        return self.f(hi) < lo < self.g(hi)

    def check_points(self) -> List[Fraction]:
        """Breakpoints inside (d0, e0) with the endpoints, plus every gap midpoint."""
        pts = sorted(self._knots())
        mids = [(a + b) / 2 for a, b in zip(pts, pts[1:])]
        return sorted(pts + mids)

    def check(self) -> None:
        """Raise CellSpecError at the first point where an invariant fails."""
        if not self.d0 < self.e0:
            raise CellSpecError("need d0 < e0", self.d0)
        if self.d is not None and self.d > self.d0:
            raise CellSpecError("need d <= d0", self.d)
        if self.e is not None and self.e < self.e0:
            raise CellSpecError("need e0 <= e", self.e)
        for name, fn in (("f", self.f), ("g", self.g)):
            if fn.lo > self.d0 or fn.hi < self.e0:
                raise CellSpecError(f"{name} is not defined on all of [d0, e0]", fn.lo)
        knots = sorted(self._knots())
        for s, t in zip(knots, knots[1:]):
            bad = _gap_violation(s, t, self.g(s) - self.f(s), self.g(t) - self.f(t))
            if bad is not None:
                raise CellSpecError("need f(x) < g(x)", bad)
        for x in knots[1:-1]:
            if not self.f(x) < self.g(x):
                raise CellSpecError("need f(x) < g(x)", x)
        for x in self.check_points():
            if self.g(x) > x:
                raise CellSpecError("need g(x) <= x", x)

    def _knots(self) -> set:
        inner = self.f.breakpoints + self.g.breakpoints
        return {self.d0, self.e0} | {x for x in inner if self.d0 < x < self.e0}


def _gap_violation(
    s: Fraction, t: Fraction, at_s: Fraction, at_t: Fraction
) -> Optional[Fraction]:
    """A point of (s, t) with g <= f, given the linear gap g - f at both ends."""
    if at_s >= 0 and at_t >= 0 and (at_s > 0 or at_t > 0):
        return None
    if at_s < 0 < at_t or at_t < 0 < at_s:
        # the gap vanishes strictly inside
        return s + at_s * (t - s) / (at_s - at_t)
    return (s + t) / 2


class StarFunctions(BaseModel):
    """f* = max(f, d0) and g* = max(g, d0) as maps of [d0, e0] into itself,
    with f*(d0) = g*(d0) = d0."""

    model_config = _MODEL_CONFIG

    d0: Rational
    f: PLFunction
    g: PLFunction

    @classmethod
    def of(cls, cell: CellSpec) -> "StarFunctions":
        if cell.g.shape != "increasing":
            raise CellSpecError("g is not strictly increasing", cell.d0)
        if cell.f.shape == "decreasing" and cell.f(cell.d0) > cell.d0:
            raise CellSpecError("f* is not increasing", cell.d0)
        return cls(d0=cell.d0, f=cell.f, g=cell.g)

    def f_star(self, x: Fraction) -> Fraction:
        return self.d0 if x == self.d0 else max(self.f(x), self.d0)

    def g_star(self, x: Fraction) -> Fraction:
        return self.d0 if x == self.d0 else max(self.g(x), self.d0)


class CliqueBuilder(BaseModel):
    """Cliques from a segment where g is the identity (``interval``) or from
    every second point of a g*-orbit that never drops to f*(start)."""

    model_config = _MODEL_CONFIG

    kind: Literal["clique_builder"] = "clique_builder"
    cell: CellSpec
    reason: Literal["fixed_segment", "descending_orbit"]
    interval: Optional[Tuple[Rational, Rational]] = None
    start: Optional[Rational] = None
    stars: Optional[StarFunctions] = None
    # number of clique points available; None when unbounded
    limit: Optional[int] = None


class BoundedColoring(BaseModel):
    model_config = _MODEL_CONFIG

    kind: Literal["bounded_coloring"] = "bounded_coloring"
    cell: CellSpec
    stars: StarFunctions
    n_bound: int
    reference: Rational
    f_orbit: Tuple[Rational, ...]

    @property
    def palette_bound(self) -> int:
        """2N colours on (d0, e0) plus the shared colour of the points <= d0."""
        return 2 * self.n_bound + 1


class BipartiteShortcut(BaseModel):
    """g <= d0 on (d0, e0): every edge joins a point above d0 to one at or below."""

    model_config = _MODEL_CONFIG

    kind: Literal["bipartite"] = "bipartite"
    cell: CellSpec


CellVerdict = Annotated[
    Union[CliqueBuilder, BoundedColoring, BipartiteShortcut],
    Field(discriminator="kind"),
]


class PointClique(BaseModel):
    model_config = _MODEL_CONFIG

    points: Tuple[Rational, ...]

    @property
    def size(self) -> int:
        return len(self.points)


# --- analysis ---


def _identity_segment(cell: CellSpec) -> Optional[Tuple[Fraction, Fraction]]:
    """A subinterval (a, b) where g(x) = x and f(x) < a, if g is the identity
    on a segment inside (d0, e0)."""
    g, f = cell.g, cell.f
    for x0, x1 in zip(g.breakpoints, g.breakpoints[1:]):
        s, t = max(x0, cell.d0), min(x1, cell.e0)
        if s < t and g(s) == s and g(t) == t:
            a = (s + t) / 2
            b = t
            if f.shape == "increasing" and f(t) > a:
                b = f.solve(a)
            return a, b
    return None


def _fixed_point_free(cell: CellSpec) -> CellSpec:
    """Rightmost maximal subinterval of (d0, e0) on which g(x) < x."""
    fixed = [x for x in cell.g.breakpoints if cell.d0 < x < cell.e0 and cell.g(x) == x]
    if not fixed:
        return cell
    logger.info(f"g has {len(fixed)} fixed points; keeping ({max(fixed)}, {cell.e0})")
    return cell.model_copy(update={"d0": max(fixed)})


def _dips_to(fn: PLFunction, lo: Fraction, hi: Fraction, level: Fraction) -> bool:
    """Whether fn(x) <= level for some x strictly between lo and hi."""
    if fn.shape == "constant":
        return fn(lo) <= level
    return min(fn(lo), fn(hi)) < level


def _orbit_start(cell: CellSpec) -> Fraction:
    """A point c of (d0, e0) with f(c) <= d0."""
    hi = cell.e0
    if cell.f.shape == "increasing" and cell.f(cell.e0) > cell.d0:
        hi = cell.f.solve(cell.d0)
    return (cell.d0 + hi) / 2


def _descent(stars: StarFunctions, c: Fraction, cap: int) -> Optional[int]:
    """Least n with (g*)^n(c) <= f*(c); None once n passes ``cap``."""
    target = stars.f_star(c)
    x, n = c, 0
    while x > target:
        x = stars.g_star(x)
        n += 1
        if n > cap:
            return None
    return n


def _f_orbit(stars: StarFunctions, start: Fraction, cap: int) -> Tuple[Fraction, ...]:
    orbit = [start]
    while orbit[-1] > stars.d0 and len(orbit) <= cap:
        nxt = stars.f_star(orbit[-1])
        if nxt >= orbit[-1]:
            raise CellSpecError("f* does not decrease", orbit[-1])
        orbit.append(nxt)
    return tuple(orbit)


def analyze_cell(
    spec: CellSpec,
) -> Union[CliqueBuilder, BoundedColoring, BipartiteShortcut]:
    """Decide between arbitrarily large cliques and a bounded colouring.

    The steps follow the case analysis of the o-minimal clique argument:
    a segment with g(x) = x gives cliques directly; otherwise (d0, e0) is cut
    down to a fixed-point-free piece. If g never rises above d0 there the cell
    is bipartite. Otherwise g is strictly increasing, and either some g*-orbit
    stays above f*(c) for ever (cliques) or every orbit drops below f*(c) within
    N steps, which yields a colouring with 2N colours.
    """
    spec.check()
    cap = get_settings().orbit_cap

    segment = _identity_segment(spec)
    if segment is not None:
        logger.info(f"g is the identity on a segment; cliques inside {segment}")
        return CliqueBuilder(cell=spec, reason="fixed_segment", interval=segment)

    cell = _fixed_point_free(spec)
    if cell.g.max_on(cell.d0, cell.e0) <= cell.d0:
        logger.info("g <= d0 on the whole interval; the cell is bipartite")
        return BipartiteShortcut(cell=cell)
    stars = StarFunctions.of(cell)

    if cell.g(cell.d0) == cell.d0 and _dips_to(cell.f, cell.d0, cell.e0, cell.d0):
        start = _orbit_start(cell)
        logger.info(f"g*-orbit of {start} never reaches f*({start}) = {cell.d0}")
        return CliqueBuilder(
            cell=cell, reason="descending_orbit", start=start, stars=stars
        )

    if stars.f_star(cell.e0) >= cell.e0:
        raise CellSpecError("need f(e0) < e0", cell.e0)
    orbit = _f_orbit(stars, cell.e0, cap)
    starts = {x for x in cell.check_points() if x > cell.d0} | set(orbit[:-1])
    n_bound = 0
    for c in sorted(starts):
        steps = _descent(stars, c, cap)
        if steps is None:
            logger.warning(f"g*-orbit of {c} stays above f*(c) for {cap} steps")
            return CliqueBuilder(
                cell=cell,
                reason="descending_orbit",
                start=c,
                stars=stars,
                limit=cap // 2 + 1,
            )
        n_bound = max(n_bound, steps)
    logger.info(f"every sampled orbit drops below f* within N={n_bound} steps")
    return BoundedColoring(
        cell=cell, stars=stars, n_bound=n_bound, reference=cell.e0, f_orbit=orbit
    )


# --- certificates ---


def materialize_sample(spec: CellSpec, points: Sequence) -> Graph:
    """Graph on ``points`` (labels, in the given order) with the cell's edges."""
    pts = [to_fraction(p) for p in points]
    if len(set(pts)) != len(pts):
        raise StructuralError("duplicate sample points")
    for p in pts:
        if not spec.in_vertex_interval(p):
            raise CellSpecError("sample point outside the vertex interval", p)
    edges = [
        (i, j)
        for i in range(len(pts))
        for j in range(i + 1, len(pts))
        if spec.adjacent(pts[i], pts[j])
    ]
    return Graph.from_edges(len(pts), edges, labels=pts)


def _check_bits(x: Fraction, max_bits: int) -> None:
    if max(x.numerator.bit_length(), x.denominator.bit_length()) > max_bits:
        raise ResourceError(f"clique point needs more than {max_bits} bits")


def emit_clique(builder: CliqueBuilder, k: int) -> PointClique:
    """k rational points, pairwise adjacent in ``builder.cell``."""
    if k < 1:
        raise StructuralError("clique size must be at least 1")
    max_bits = get_settings().max_bits
    cell = builder.cell
    points: List[Fraction] = []
    if builder.reason == "fixed_segment":
        a, b = builder.interval
        points = [a + (b - a) * i / (k + 1) for i in range(1, k + 1)]
    else:
        if builder.limit is not None and k > builder.limit:
            raise ResourceError(
                f"only {builder.limit} orbit points certified, asked for {k}"
            )
        x = builder.start
        points.append(x)
        while len(points) < k:
            x = builder.stars.g_star(builder.stars.g_star(x))
            _check_bits(x, max_bits)
            points.append(x)
    for p in points:
        _check_bits(p, max_bits)
    for i, u in enumerate(points):
        for v in points[i + 1 :]:
            if not cell.adjacent(u, v):
                raise ContractError(f"emitted points {u} and {v} are not adjacent")
    return PointClique(points=tuple(points))


def color_point(verdict: Union[BoundedColoring, BipartiteShortcut], u) -> int:
    """Colour of vertex u: (n mod 2) * N + i for u in the i-th g*-slot of I_n,
    2N at or below d0, 0 at or above e0 (isolated there).

    For a bipartite cell the two sides of d0 get colours 0 and 1.
    """
    u = to_fraction(u)
    cell = verdict.cell
    if not cell.in_vertex_interval(u):
        raise CellSpecError("point outside the vertex interval", u)
    if isinstance(verdict, BipartiteShortcut):
        return 0 if u > cell.d0 else 1
    stars, big_n = verdict.stars, verdict.n_bound
    if u >= cell.e0:
        return 0
    if u <= cell.d0:
        return 2 * big_n
    orbit = verdict.f_orbit
    for n in range(len(orbit) - 1):
        if orbit[n + 1] <= u:
            break
    else:
        raise ResourceError(f"{u} lies below the {len(orbit)} computed f*-orbit points")
    x, i = orbit[n], 0
    while True:
        x = stars.g_star(x)
        if x <= u:
            break
        i += 1
        if i >= big_n:
            raise ResourceError(f"{u} needs a slot index >= N = {big_n}")
    return (n % 2) * big_n + i


def grid_points(cell: CellSpec, count: int, below: bool = False) -> List[Fraction]:
    """``count`` evenly spaced points of (d0, e0); with ``below`` the grid starts
    at d (or d0 - (e0 - d0) when d is unbounded) so lower endpoints are sampled."""
    if count < 1:
        raise StructuralError("sample size must be positive")
    lo = cell.d0
    if below:
        lo = cell.d if cell.d is not None else 2 * cell.d0 - cell.e0
    return [lo + (cell.e0 - lo) * i / (count + 1) for i in range(1, count + 1)]
