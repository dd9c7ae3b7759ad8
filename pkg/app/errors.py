# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Exception types raised by the tropwitt engine."""

from typing import Iterable, Optional


class TropwittError(ValueError):
    """Base class for all engine errors."""


class InvalidInputError(TropwittError):
    """Malformed polygon, polynomial, curve file or command option."""


class DegenerateGeometryError(TropwittError):
    """A segment, triangle or polygon with no extent."""


class NotNodalError(TropwittError):
    """A subdivision cell is neither a triangle nor a parallelogram."""

    def __init__(self, message: str = "not nodal"):
        super().__init__(message)


class NotANodeError(TropwittError):
    """A singular point with vanishing Hessian determinant."""

    def __init__(self, message: str = "not a node"):
        super().__init__(message)


class IndeterminateSignatureError(TropwittError):
    """Signature requested for a form carrying symbolic atoms."""


class NonEtaleInputError(TropwittError):
    """Degenerate trace form, so the algebra is not etale."""


class NonGenericMarkingError(TropwittError):
    """A marked curve violates the graph construction properties."""

    def __init__(self, message: str, where: Optional[object] = None):
        self.where = where
        if where is not None:
            message = f"non-generic marking: {message} (at {where})"
        else:
            message = f"non-generic marking: {message}"
        super().__init__(message)


class InconsistentMarkingError(TropwittError):
    """Extension tower dimensions are not integral or do not telescope."""


class TraceResidueError(TropwittError):
    """Symbolic atoms survived a trace down to the base field."""

    def __init__(self, atoms: Iterable[str]):
        self.atoms = tuple(sorted(atoms))
        super().__init__(f"trace residue: unresolved atoms {', '.join(self.atoms)}")


class InternalCheckError(TropwittError):
    """An internal consistency assertion failed."""
