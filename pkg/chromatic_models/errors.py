"""Exception hierarchy shared by every module and mapped to CLI exit codes."""

from typing import Any, Optional


class ChromaticModelsError(Exception):
    """Base class for all errors raised by the package."""


class StructuralError(ChromaticModelsError, ValueError):
    """Malformed input: asymmetric rows, bad glue, partial colorings, ..."""


class DegenerateInputError(StructuralError):
    """Input is empty where the construction needs at least one element."""


class CellSpecError(StructuralError):
    """A cell specification violates one of its invariants at ``point``."""

    def __init__(self, message: str, point: Optional[Any] = None):
        super().__init__(message if point is None else f"{message} (at x={point})")
        self.point = point


class ContractError(ChromaticModelsError):
    """A mathematical precondition of an operation does not hold."""


class NotInClassError(ContractError):
    """Raised when a graph turns out not to belong to the class it was promised to.

    ``witness`` is the vertex set certifying the violation.
    """

    def __init__(self, message: str, witness: frozenset = frozenset()):
        super().__init__(message)
        self.witness = witness


class ResourceError(ChromaticModelsError):
    """A configured bound (iteration cap, bit size) was exceeded."""


class GraphFormatError(ChromaticModelsError):
    """An input file could not be parsed."""
