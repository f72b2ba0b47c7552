"""Dimension-generic vector geometry for point triples.

Vectors are plain ``numpy`` float arrays of length n >= 2.  The wedge norm
``|a ^ b| = sqrt(|a|^2 |b|^2 - (a.b)^2)`` replaces the cross product, so every
routine works in any ambient dimension.  The three-point circle quantities
(circumcenter, circumradius, Menger curvature, tangent at a vertex) are all
closed-form; no plane projection or linear solve is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CoincidentPointsError,
    CollinearPointsError,
    DimensionMismatchError,
)

# Relative tolerance deciding when a triple counts as collinear:
# |w1 ^ w2| <= COLLINEAR_TOL * |w1| * |w2| (scale independent).
COLLINEAR_TOL = 1e-13

# Points closer than COINCIDENT_TOL * max(1, |a|, |b|) are coincident,
# which is an error for every triple operation (never silently collinear).
COINCIDENT_TOL = 1e-14


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Validate *x* as a finite float vector of length >= 2."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise DimensionMismatchError(f"expected a vector of length >= 2, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"vector has non-finite coordinates: {v}")
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.size}")
    return v


def _triple(v1, v2, v3) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a = as_vector(v1)
    b = as_vector(v2, dim=a.size)
    c = as_vector(v3, dim=a.size)
    scale = max(1.0, float(np.linalg.norm(a)), float(np.linalg.norm(b)),
                float(np.linalg.norm(c)))
    for p, q, name in ((a, b, "v1,v2"), (b, c, "v2,v3"), (c, a, "v3,v1")):
        if np.linalg.norm(p - q) <= COINCIDENT_TOL * scale:
            raise CoincidentPointsError(f"points {name} coincide: {p} ~ {q}")
    return a, b, c


def wedge_norm(a, b) -> float:
    """Norm of the wedge product, ``sqrt(|a|^2 |b|^2 - (a.b)^2)``.

    Equals the area of the parallelogram spanned by *a* and *b* and, in 3D,
    the cross-product norm.  Zero iff the vectors are parallel.
    """
    a = as_vector(a)
    b = as_vector(b, dim=a.size)
    gram = float(a @ a) * float(b @ b) - float(a @ b) ** 2
    return math.sqrt(max(gram, 0.0))


def is_collinear(v1, v2, v3) -> bool:
    """Relative collinearity test for three pairwise-distinct points."""
    a, b, c = _triple(v1, v2, v3)
    w1 = b - a
    w2 = c - b
    return wedge_norm(w1, w2) <= COLLINEAR_TOL * float(np.linalg.norm(w1)) * float(np.linalg.norm(w2))


def circumradius(v1, v2, v3) -> float:
    """Radius of the circle through three points; ``inf`` when collinear.

    Law of sines in closed form: the product of the three side lengths over
    twice the wedge norm of two sides.
    """
    a, b, c = _triple(v1, v2, v3)
    w1 = b - a
    w2 = c - b
    wedge = wedge_norm(w1, w2)
    n1 = float(np.linalg.norm(w1))
    n2 = float(np.linalg.norm(w2))
    if wedge <= COLLINEAR_TOL * n1 * n2:
        return math.inf
    return n1 * n2 * float(np.linalg.norm(a - c)) / (2.0 * wedge)


def menger_curvature(v1, v2, v3) -> float:
    """Reciprocal circumradius of the triple; 0 for collinear points."""
    r = circumradius(v1, v2, v3)
    return 0.0 if math.isinf(r) else 1.0 / r


def _vertex_angles(a, b, c):
    """sin and cos of the interior angles at a, b, c."""
    out = []
    for p, q, r in ((a, b, c), (b, c, a), (c, a, b)):
        u = q - p
        v = r - p
        nu = float(np.linalg.norm(u))
        nv = float(np.linalg.norm(v))
        cos_phi = float(u @ v) / (nu * nv)
        sin_phi = wedge_norm(u, v) / (nu * nv)
        out.append((sin_phi, cos_phi))
    return out


def circumcenter(v1, v2, v3) -> np.ndarray:
    """Center of the circle through three non-collinear points.

    Barycentric combination with weights sin(2 phi_i), phi_i the interior
    angle at vertex i; exact for obtuse triangles as well (weights may be
    negative there).
    """
    a, b, c = _triple(v1, v2, v3)
    if is_collinear(a, b, c):
        raise CollinearPointsError("circumcenter undefined for collinear points")
    angles = _vertex_angles(a, b, c)
    weights = [2.0 * s * co for s, co in angles]
    total = sum(weights)
    return (weights[0] * a + weights[1] * b + weights[2] * c) / total


@dataclass(frozen=True)
class Circumcircle:
    """Circle through three points: center, radius, and in-plane basis.

    For collinear triples the radius is ``inf`` and the remaining fields are
    ``None`` (a line has no center or preferred plane basis).
    """

    center: np.ndarray | None
    radius: float
    e1: np.ndarray | None
    e2: np.ndarray | None


def circumcircle(v1, v2, v3) -> Circumcircle:
    """Full circumcircle data for a point triple."""
    a, b, c = _triple(v1, v2, v3)
    if is_collinear(a, b, c):
        return Circumcircle(center=None, radius=math.inf, e1=None, e2=None)
    center = circumcenter(a, b, c)
    radius = circumradius(a, b, c)
    u1 = (a - center) / radius
    u2 = (b - center) / radius
    e2 = u2 - float(u2 @ u1) * u1
    e2 = e2 / float(np.linalg.norm(e2))
    return Circumcircle(center=center, radius=radius, e1=u1, e2=e2)


def three_point_tangent(v1, v2, v3, at: int) -> np.ndarray:
    """Unit tangent of the circle through v1, v2, v3 at the point ``at``.

    The orientation follows the traversal order of the arguments
    (v1 -> v2 -> v3).  With cyclic edge vectors w_i = v_{i+1} - v_i the
    tangent at v_i is

        (|w_{i-1}|^2 w_i + |w_i|^2 w_{i-1}) / (|w_i| |w_{i+1}| |w_{i-1}|),

    which is algebraically unit-norm, and for collinear inputs degenerates
    to the (signed) chord direction with no special casing.
    """
    if at not in (1, 2, 3):
        raise ValueError(f"'at' must be 1, 2 or 3, got {at!r}")
    a, b, c = _triple(v1, v2, v3)
    w = (b - a, c - b, a - c)
    i = at - 1
    wi = w[i]
    wprev = w[i - 1]
    wnext = w[(i + 1) % 3]
    num = float(wprev @ wprev) * wi + float(wi @ wi) * wprev
    den = float(np.linalg.norm(wi)) * float(np.linalg.norm(wnext)) * float(np.linalg.norm(wprev))
    return num / den
