from fractions import Fraction

import pytest

from chromatic_models.certificates import (
    CliqueCertificate,
    ColoringCertificate,
    HalfGraphCertificate,
    PointCliqueCertificate,
    PointColoringCertificate,
    ShatterCertificate,
    read_certificate,
    verify_certificate,
    write_certificate,
)
from chromatic_models.errors import GraphFormatError
from chromatic_models.graph_core import cycle_graph, half_graph, path_graph
from chromatic_models.graph_io import GraphDescriptor
from chromatic_models.interval_cell import (
    CellSpec,
    PLFunction,
    analyze_cell,
    color_point,
    emit_clique,
    grid_points,
)
from chromatic_models.witnesses import ShatterWitness, max_half_graph

C5 = GraphDescriptor.from_graph(cycle_graph(5))


@pytest.fixture
def halving_cell():
    return CellSpec(
        d0=0,
        e0=1,
        f=PLFunction.constant(0, 0, 1),
        g=PLFunction.linear("1/2", 0, 0, 1),
    )


@pytest.fixture
def shifted_cell():
    return CellSpec(
        d0=0,
        e0=100,
        f=PLFunction.linear(1, "-5/2", 0, 100),
        g=PLFunction.linear(1, -1, 0, 100),
    )


def test_coloring_certificate():
    good = ColoringCertificate(graph=C5, colors=(0, 1, 0, 1, 2), palette=3)
    assert verify_certificate(good)
    assert not verify_certificate(good.model_copy(update={"palette": 2}))
    assert not verify_certificate(good.model_copy(update={"colors": (0, 1, 0, 1, 0)}))
    assert not verify_certificate(good.model_copy(update={"colors": (0, 1, 0)}))


@pytest.mark.parametrize(
    "members, ok", [((0, 1), True), ((0, 2), False), ((0, 0), False), ((0, 7), False)]
)
def test_clique_certificate(members, ok):
    assert verify_certificate(CliqueCertificate(graph=C5, members=members)) == ok


def test_half_graph_certificate():
    g = half_graph(3)
    _, witness = max_half_graph(g, 3)
    cert = HalfGraphCertificate(graph=GraphDescriptor.from_graph(g), witness=witness)
    assert verify_certificate(cert)
    flipped = witness.model_copy(update={"a_seq": tuple(reversed(witness.a_seq))})
    assert not verify_certificate(cert.model_copy(update={"witness": flipped}))


def test_shatter_certificate():
    graph = GraphDescriptor.from_graph(path_graph(3))
    good = ShatterWitness(base=(0,), realizers=[((), 2), ((0,), 1)])
    assert verify_certificate(ShatterCertificate(graph=graph, witness=good))
    bad = ShatterWitness(base=(0,), realizers=[((), 1), ((0,), 1)])
    assert not verify_certificate(ShatterCertificate(graph=graph, witness=bad))


def test_point_clique_certificate(halving_cell):
    points = emit_clique(analyze_cell(halving_cell), 6).points
    cert = PointCliqueCertificate(cell=halving_cell, points=points)
    assert verify_certificate(cert)
    extra = cert.model_copy(update={"points": points + (Fraction(1, 3),)})
    assert not verify_certificate(extra)
    twice = cert.model_copy(update={"points": points + points[:1]})
    assert not verify_certificate(twice)


def test_point_coloring_certificate(shifted_cell):
    verdict = analyze_cell(shifted_cell)
    points = tuple(grid_points(shifted_cell, 40))
    colors = tuple(color_point(verdict, p) for p in points)
    cert = PointColoringCertificate(
        cell=shifted_cell, points=points, colors=colors, palette=verdict.palette_bound
    )
    assert verify_certificate(cert)
    flat = cert.model_copy(update={"colors": (0,) * len(points)})
    assert not verify_certificate(flat)
    short = cert.model_copy(update={"colors": colors[:-1]})
    assert not verify_certificate(short)


def test_write_and_read_back(tmp_path, halving_cell):
    points = emit_clique(analyze_cell(halving_cell), 4).points
    cert = PointCliqueCertificate(cell=halving_cell, points=points)
    path = write_certificate(cert, tmp_path / "halving")
    assert path.name == "halving.cert.json"
    assert '"1/8"' in path.read_text()
    loaded = read_certificate(path)
    assert loaded == cert
    assert verify_certificate(loaded)

    plain = ColoringCertificate(graph=C5, colors=(0, 1, 0, 1, 2), palette=3)
    assert read_certificate(write_certificate(plain, tmp_path / "c5")) == plain


@pytest.mark.parametrize(
    "text", ['{"kind": "unknown"}', '{"kind": "clique", "members": [0]}', "not json"]
)
def test_read_certificate_rejects_bad_files(tmp_path, text):
    path = tmp_path / "bad.cert.json"
    path.write_text(text)
    with pytest.raises(GraphFormatError):
        read_certificate(path)


def test_read_certificate_rejects_undecodable_bytes(tmp_path):
    path = tmp_path / "latin.cert.json"
    path.write_bytes(b'{"kind": "clique", "note": "\xe9"}')
    with pytest.raises(GraphFormatError) as info:
        read_certificate(path)
    assert "latin.cert.json" in str(info.value)
