"""
Graph interchange: DIMACS edge lists and a JSON descriptor
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

from pydantic import BaseModel, ValidationError

from chromatic_models.errors import GraphFormatError, StructuralError
from chromatic_models.graph_core import Graph

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class GraphDescriptor(BaseModel):
    n: int
    edges: List[Tuple[int, int]]
    labels: Optional[List[Any]] = None

    @classmethod
    def from_graph(cls, g: Graph) -> "GraphDescriptor":
        labels = None if g.labels is None else [_plain(x) for x in g.labels]
        return cls(n=g.n, edges=g.edges(), labels=labels)

    def to_graph(self) -> Graph:
        labels = None if self.labels is None else [_hashable(x) for x in self.labels]
        keys = [(min(u, v), max(u, v)) for u, v in self.edges]
        if len(set(keys)) != len(keys):
            raise GraphFormatError("duplicate edge in descriptor")
        try:
            return Graph.from_edges(self.n, self.edges, labels)
        except StructuralError as exc:
            raise GraphFormatError(str(exc)) from exc


def _plain(label: Any) -> Any:
    if isinstance(label, Fraction):
        return str(label)
    if isinstance(label, tuple):
        return [_plain(x) for x in label]
    return label


def _hashable(label: Any) -> Any:
    if isinstance(label, list):
        return tuple(_hashable(x) for x in label)
    return label


def format_dimacs(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.edge_count()}"]
    lines.extend(f"e {u + 1} {v + 1}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> Graph:
    """Parse ``p edge n m`` / ``e u v`` text (1-based vertices)."""
    n = m = None
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise GraphFormatError(f"line {lineno}: second problem line")
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise GraphFormatError(f"line {lineno}: expected 'p edge n m'")
            n, m = _ints(parts[2:], lineno)
        elif parts[0] == "e":
            if n is None:
                raise GraphFormatError(f"line {lineno}: edge before problem line")
            if len(parts) != 3:
                raise GraphFormatError(f"line {lineno}: expected 'e u v'")
            u, v = _ints(parts[1:], lineno)
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(f"line {lineno}: vertex outside 1..{n}")
            if u == v:
                raise GraphFormatError(f"line {lineno}: loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphFormatError(f"line {lineno}: duplicate edge {u}-{v}")
            seen.add(key)
        else:
            raise GraphFormatError(f"line {lineno}: unknown record '{parts[0]}'")
    if n is None:
        raise GraphFormatError("missing problem line")
    if len(seen) != m:
        raise GraphFormatError(f"header declares {m} edges, found {len(seen)}")
    return Graph.from_edges(n, [(u - 1, v - 1) for u, v in sorted(seen)])


def _ints(tokens: List[str], lineno: int) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise GraphFormatError(f"line {lineno}: {exc}") from exc


def dumps_json(g: Graph) -> str:
    return json.dumps(GraphDescriptor.from_graph(g).model_dump(), sort_keys=True)


def loads_json(text: str) -> Graph:
    try:
        return GraphDescriptor.model_validate_json(text).to_graph()
    except ValidationError as exc:
        raise GraphFormatError(f"bad graph descriptor: {exc}") from exc


def read_graph(path: PathLike) -> Graph:
    """Read a ``.json`` descriptor or a DIMACS file, chosen by suffix."""
    path = Path(path)
    try:
        text = path.read_text()
    except UnicodeDecodeError as exc:
        raise GraphFormatError(f"{path} is not UTF-8 text: {exc}") from exc
    g = loads_json(text) if path.suffix == ".json" else parse_dimacs(text)
    logger.debug(f"read {g!r} from {path}")
    return g


def write_graph(g: Graph, path: PathLike) -> Path:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(dumps_json(g) + "\n")
    else:
        path.write_text(format_dimacs(g))
    return path
