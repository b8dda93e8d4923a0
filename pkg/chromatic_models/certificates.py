"""
Self-contained JSON certificates and their definitional re-checks.

A certificate carries everything needed to verify it (the graph or the cell
spec plus the witness); ``verify_certificate`` never calls a solver.
"""

import json
import logging
from pathlib import Path
from typing import Annotated, Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from chromatic_models.coloring import Coloring, verify_coloring
from chromatic_models.errors import GraphFormatError, StructuralError
from chromatic_models.graph_io import GraphDescriptor, PathLike
from chromatic_models.interval_cell import CellSpec, Rational
from chromatic_models.witnesses import (
    HalfGraphWitness,
    ShatterWitness,
    verify_half_graph,
    verify_shatter,
)

logger = logging.getLogger(__name__)

SUFFIX = ".cert.json"


class ColoringCertificate(BaseModel):
    kind: Literal["coloring"] = "coloring"
    graph: GraphDescriptor
    colors: Tuple[int, ...]
    palette: int


class CliqueCertificate(BaseModel):
    kind: Literal["clique"] = "clique"
    graph: GraphDescriptor
    members: Tuple[int, ...]


class HalfGraphCertificate(BaseModel):
    kind: Literal["half_graph"] = "half_graph"
    graph: GraphDescriptor
    witness: HalfGraphWitness


class ShatterCertificate(BaseModel):
    kind: Literal["shatter"] = "shatter"
    graph: GraphDescriptor
    witness: ShatterWitness


class PointCliqueCertificate(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: Literal["point_clique"] = "point_clique"
    cell: CellSpec
    points: Tuple[Rational, ...]


class PointColoringCertificate(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: Literal["point_coloring"] = "point_coloring"
    cell: CellSpec
    points: Tuple[Rational, ...]
    colors: Tuple[int, ...]
    palette: int


Certificate = Annotated[
    Union[
        ColoringCertificate,
        CliqueCertificate,
        HalfGraphCertificate,
        ShatterCertificate,
        PointCliqueCertificate,
        PointColoringCertificate,
    ],
    Field(discriminator="kind"),
]

_adapter = TypeAdapter(Certificate)


def _pairwise_adjacent(cell: CellSpec, points) -> bool:
    return all(
        cell.adjacent(u, v) for i, u in enumerate(points) for v in points[i + 1 :]
    )


def verify_certificate(cert: Certificate) -> bool:
    """Re-check a certificate from its definition alone."""
    if isinstance(cert, ColoringCertificate):
        g = cert.graph.to_graph()
        try:
            proper = verify_coloring(g, Coloring(colors=cert.colors))
        except StructuralError:
            return False
        return proper and len(set(cert.colors)) <= cert.palette
    if isinstance(cert, CliqueCertificate):
        g = cert.graph.to_graph()
        distinct = len(set(cert.members)) == len(cert.members)
        in_range = all(0 <= v < g.n for v in cert.members)
        return distinct and in_range and g.is_clique(cert.members)
    if isinstance(cert, HalfGraphCertificate):
        return verify_half_graph(cert.graph.to_graph(), cert.witness)
    if isinstance(cert, ShatterCertificate):
        return verify_shatter(cert.graph.to_graph(), cert.witness)
    if isinstance(cert, PointCliqueCertificate):
        if len(set(cert.points)) != len(cert.points):
            return False
        return _pairwise_adjacent(cert.cell, cert.points)
    if isinstance(cert, PointColoringCertificate):
        pts, colors = cert.points, cert.colors
        if len(set(pts)) != len(pts) or len(colors) != len(pts):
            return False
        if any(c < 0 for c in colors) or len(set(colors)) > cert.palette:
            return False
        return all(
            colors[i] != colors[j]
            for i in range(len(pts))
            for j in range(i + 1, len(pts))
            if cert.cell.adjacent(pts[i], pts[j])
        )
    raise StructuralError(f"unknown certificate {type(cert).__name__}")


def dumps_certificate(cert: Certificate) -> str:
    return json.dumps(cert.model_dump(mode="json"), sort_keys=True, indent=2)


def write_certificate(cert: Certificate, prefix: PathLike) -> Path:
    path = Path(str(prefix) + SUFFIX)
    path.write_text(dumps_certificate(cert) + "\n")
    logger.info(f"wrote {cert.kind} certificate to {path}")
    return path


def read_certificate(path: PathLike) -> Certificate:
    try:
        return _adapter.validate_json(Path(path).read_text())
    except (ValidationError, UnicodeDecodeError) as exc:
        raise GraphFormatError(f"bad certificate {path}: {exc}") from exc
