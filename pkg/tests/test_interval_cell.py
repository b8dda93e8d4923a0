from fractions import Fraction

import pytest
from pydantic import ValidationError

from chromatic_models.coloring import Coloring, chromatic_number, verify_coloring
from chromatic_models.errors import CellSpecError, ResourceError, StructuralError
from chromatic_models.interval_cell import (
    BipartiteShortcut,
    BoundedColoring,
    CellSpec,
    CliqueBuilder,
    PLFunction,
    analyze_cell,
    color_point,
    emit_clique,
    grid_points,
    materialize_sample,
)


@pytest.fixture
def shifted_cell():
    # u ~ v for v - 5/2 < u < v - 1
    return CellSpec(
        d0=0,
        e0=100,
        f=PLFunction.linear(1, "-5/2", 0, 100),
        g=PLFunction.linear(1, -1, 0, 100),
    )


@pytest.fixture
def halving_cell():
    return CellSpec(
        d0=0,
        e0=1,
        f=PLFunction.constant(0, 0, 1),
        g=PLFunction.linear("1/2", 0, 0, 1),
    )


@pytest.fixture
def identity_piece_cell():
    g = PLFunction(breakpoints=(0, 1, 2, 4), values=(-1, 1, 2, 3))
    return CellSpec(d0=0, e0=4, d=-3, f=PLFunction.constant(-2, 0, 4), g=g)


@pytest.fixture
def bipartite_cell():
    return CellSpec(
        d=-10,
        d0=0,
        e0=10,
        f=PLFunction.linear(-1, -1, 0, 10),
        g=PLFunction.linear("-1/2", 0, 0, 10),
    )


def _sample_coloring(verdict, points) -> Coloring:
    return Coloring(colors=tuple(color_point(verdict, p) for p in points))


def test_pl_function_evaluation():
    g = PLFunction(breakpoints=(0, 1, 2, 4), values=(-1, 1, 2, 3))
    assert g(Fraction(1, 2)) == 0
    assert g(3) == Fraction(5, 2)
    assert g(4) == 3
    assert g.shape == "increasing"
    assert g.solve(Fraction(3, 2)) == Fraction(3, 2)
    assert g.max_on(Fraction(0), Fraction(2)) == 2
    assert PLFunction.constant(-2, 0, 4).solve(Fraction(-2)) is None
    with pytest.raises(CellSpecError) as info:
        g(5)
    assert info.value.point == 5


@pytest.mark.parametrize(
    "breakpoints, values",
    [
        ((0,), (1,)),
        ((0, 1), (1,)),
        ((1, 0), (0, 1)),
        ((0, 1, 2), (0, 1, 0)),
    ],
)
def test_pl_function_rejects_bad_shapes(breakpoints, values):
    with pytest.raises(ValidationError):
        PLFunction(breakpoints=breakpoints, values=values)


def test_cell_from_json_strings():
    cell = CellSpec.model_validate(
        {
            "d0": "0",
            "e0": "100",
            "f": {"breakpoints": ["0", "100"], "values": ["-5/2", "195/2"]},
            "g": {"breakpoints": [0, 100], "values": [-1, 99]},
        }
    )
    assert cell.f(Fraction(5, 2)) == 0
    assert cell.adjacent(10, 8)
    assert cell.adjacent(8, 10)
    assert not cell.adjacent(10, Fraction(15, 2))
    assert not cell.adjacent(10, 9)


def test_shifted_cell_has_bounded_coloring(shifted_cell):
    verdict = analyze_cell(shifted_cell)
    assert isinstance(verdict, BoundedColoring)
    assert verdict.n_bound == 3
    assert verdict.palette_bound == 7
    assert verdict.reference == 100
    assert verdict.f_orbit[0] == 100 and verdict.f_orbit[-1] == 0
    assert len(verdict.f_orbit) == 41

    points = grid_points(shifted_cell, 40)
    sample = materialize_sample(shifted_cell, points)
    coloring = _sample_coloring(verdict, points)
    assert verify_coloring(sample, coloring)
    assert coloring.palette_size <= 6
    assert chromatic_number(sample)[0] <= 6


def test_shifted_cell_coloring_below_d0(shifted_cell):
    verdict = analyze_cell(shifted_cell)
    points = grid_points(shifted_cell, 60, below=True)
    assert min(points) < 0
    coloring = _sample_coloring(verdict, points)
    assert verify_coloring(materialize_sample(shifted_cell, points), coloring)
    assert max(coloring.colors) <= 2 * verdict.n_bound
    assert color_point(verdict, -3) == 6
    assert color_point(verdict, 100) == 0


def test_star_maps_are_monotone(shifted_cell):
    stars = analyze_cell(shifted_cell).stars
    xs = [Fraction(0)] + grid_points(shifted_cell, 30) + [Fraction(100)]
    for x, y in zip(xs, xs[1:]):
        assert stars.f_star(x) <= stars.f_star(y)
        assert stars.g_star(x) < stars.g_star(y) or stars.g_star(y) == 0
    assert stars.f_star(Fraction(0)) == stars.g_star(Fraction(0)) == 0


def test_halving_cell_has_descending_orbit(halving_cell):
    verdict = analyze_cell(halving_cell)
    assert isinstance(verdict, CliqueBuilder)
    assert verdict.reason == "descending_orbit"
    assert verdict.start == Fraction(1, 2)
    assert verdict.limit is None
    clique = emit_clique(verdict, 50)
    assert clique.size == 50
    assert clique.points[:3] == (Fraction(1, 2), Fraction(1, 8), Fraction(1, 32))
    pts = clique.points
    assert all(
        halving_cell.adjacent(pts[i], pts[j])
        for i in range(len(pts))
        for j in range(i + 1, len(pts))
    )


def test_identity_piece_gives_fixed_segment(identity_piece_cell):
    verdict = analyze_cell(identity_piece_cell)
    assert isinstance(verdict, CliqueBuilder)
    assert verdict.reason == "fixed_segment"
    assert verdict.interval == (Fraction(3, 2), Fraction(2))
    clique = emit_clique(verdict, 20)
    assert all(Fraction(3, 2) < p < 2 for p in clique.points)
    sample = materialize_sample(identity_piece_cell, clique.points)
    assert sample.edge_count() == 20 * 19 // 2


def test_decreasing_g_cell_is_bipartite(bipartite_cell):
    verdict = analyze_cell(bipartite_cell)
    assert isinstance(verdict, BipartiteShortcut)
    points = grid_points(bipartite_cell, 30, below=True)
    sample = materialize_sample(bipartite_cell, points)
    assert sample.edge_count() > 0
    coloring = _sample_coloring(verdict, points)
    assert verify_coloring(sample, coloring)
    assert coloring.palette_size == 2


def test_orbit_cap_falls_back_to_short_cliques(shifted_cell, settings_env):
    settings_env(orbit_cap=2)
    verdict = analyze_cell(shifted_cell)
    assert isinstance(verdict, CliqueBuilder)
    assert verdict.limit == 2
    assert verdict.start == 50
    assert emit_clique(verdict, 2).points == (Fraction(50), Fraction(48))
    with pytest.raises(ResourceError):
        emit_clique(verdict, 3)


def test_emit_clique_respects_bit_budget(halving_cell, settings_env):
    settings_env(max_bits=8)
    verdict = analyze_cell(halving_cell)
    assert emit_clique(verdict, 3).size == 3
    with pytest.raises(ResourceError):
        emit_clique(verdict, 10)


def test_emit_clique_needs_positive_size(halving_cell):
    with pytest.raises(StructuralError):
        emit_clique(analyze_cell(halving_cell), 0)


@pytest.mark.parametrize(
    "changes",
    [
        {"d0": 100, "e0": 0},
        {"d": 5},
        {"e": 50},
        {"g": PLFunction.linear(1, 1, 0, 100)},
        {"f": PLFunction.linear(1, 0, 0, 100)},
        {"g": PLFunction.linear(1, -1, 10, 100)},
        # f crosses above g between d0 and the first midpoint
        {"f": PLFunction(breakpoints=(0, 100), values=("-1/2", "195/2"))},
    ],
)
def test_cell_check_rejects_bad_cells(shifted_cell, changes):
    bad = shifted_cell.model_copy(update=changes)
    with pytest.raises(CellSpecError):
        bad.check()
    with pytest.raises(CellSpecError):
        analyze_cell(bad)


def test_materialize_sample_errors(shifted_cell, identity_piece_cell):
    with pytest.raises(StructuralError):
        materialize_sample(shifted_cell, [1, 2, 1])
    with pytest.raises(CellSpecError):
        materialize_sample(identity_piece_cell, [-5, 1])
    with pytest.raises(StructuralError):
        grid_points(shifted_cell, 0)


def test_materialized_labels_are_fractions(shifted_cell):
    sample = materialize_sample(shifted_cell, ["10", "8", "17/2"])
    assert sample.labels == (Fraction(10), Fraction(8), Fraction(17, 2))
    assert sample.adjacent(0, 1) and sample.adjacent(0, 2)
    assert not sample.adjacent(1, 2)


def test_cell_check_catches_crossing_next_to_d0():
    # f > g on (0, 1/3); every midpoint alone would pass
    cell = CellSpec(
        d0=0,
        e0=1,
        f=PLFunction.linear("1/5", "1/10", 0, 1),
        g=PLFunction.linear("1/2", 0, 0, 1),
    )
    assert all(cell.f(x) < cell.g(x) for x in cell.check_points()[1:-1])
    with pytest.raises(CellSpecError) as info:
        cell.check()
    assert info.value.point == Fraction(1, 3)
    with pytest.raises(CellSpecError):
        analyze_cell(cell)


def test_cell_check_rejects_touching_at_a_breakpoint():
    g = PLFunction(breakpoints=(0, 1, 2), values=(-1, 0, 1))
    f = PLFunction(breakpoints=(0, 1, 2), values=(-2, 0, "1/2"))
    cell = CellSpec(d0=0, e0=2, f=f, g=g)
    with pytest.raises(CellSpecError) as info:
        cell.check()
    assert info.value.point == 1
