"""Exception hierarchy shared across the package."""

from __future__ import annotations


class KnotEnergyError(Exception):
    """Base class for all package-specific errors."""


class InputError(KnotEnergyError, ValueError):
    """Malformed user input: files, spec strings, option combinations."""


class DimensionMismatchError(KnotEnergyError, ValueError):
    """Vectors of different ambient dimensions were mixed."""


class GeometryError(KnotEnergyError, ValueError):
    """Degenerate point configuration that has no well-defined result."""


class CoincidentPointsError(GeometryError):
    """Two points that must be distinct coincide (within tolerance)."""


class CollinearPointsError(GeometryError):
    """Three points are collinear where a proper circle is required."""


class AdjacencyError(GeometryError):
    """A vertex pair with cyclic index distance <= 1 was used where the
    energy terms require distance > 1."""


class SelfIntersectionError(GeometryError):
    """Non-consecutive polygon edges touch (minimal distance ~ 0)."""


class PoleHitError(KnotEnergyError, ValueError):
    """A point was mapped to infinity by a sphere inversion.

    Carries enough context to identify which primitive of a composed
    transform failed and on which point.
    """

    def __init__(self, message: str, primitive_index: int | None = None,
                 point=None):
        super().__init__(message)
        self.primitive_index = primitive_index
        self.point = point
