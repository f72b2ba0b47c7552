"""The Moebius group acting on R^n (poles excluded, not compactified).

A transform is an ordered composition of four primitive kinds: translation,
orthogonal map, positive scaling, and sphere inversion.  Keeping the
primitive list (instead of a matrix model on the conformal sphere) makes
each application exact and lets a pole hit name the offending primitive and
point.  Points mapped to infinity raise :class:`PoleHitError`; infinity is
never represented as data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AdjacencyError, CoincidentPointsError, GeometryError, InputError, PoleHitError
from .polygon import ClosedPolygon, cyclic_index_distance
from .vecgeom import COINCIDENT_TOL, as_vector

# Relative distance to an inversion center below which we refuse to invert.
POLE_TOL = 1e-12


@dataclass(frozen=True)
class Translation:
    offset: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "offset", as_vector(self.offset))

    def apply(self, pts):
        return pts + self.offset

    def apply_tangent(self, pts, tangents):
        return tangents

    def to_json_obj(self):
        return {"type": "translation", "vector": self.offset.tolist()}


@dataclass(frozen=True)
class Orthogonal:
    matrix: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.matrix, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise InputError(f"orthogonal factor must be square, got shape {q.shape}")
        if np.max(np.abs(q.T @ q - np.eye(q.shape[0]))) > 1e-12:
            raise InputError("matrix is not orthogonal to 1e-12")
        q.setflags(write=False)
        object.__setattr__(self, "matrix", q)

    def apply(self, pts):
        return pts @ self.matrix.T

    def apply_tangent(self, pts, tangents):
        return tangents @ self.matrix.T

    def to_json_obj(self):
        return {"type": "orthogonal", "matrix": self.matrix.tolist()}


@dataclass(frozen=True)
class Scaling:
    factor: float

    def __post_init__(self):
        if not (self.factor > 0):
            raise InputError(f"scaling factor must be positive, got {self.factor}")

    def apply(self, pts):
        return self.factor * pts

    def apply_tangent(self, pts, tangents):
        return self.factor * tangents

    def to_json_obj(self):
        return {"type": "scaling", "factor": self.factor}


@dataclass(frozen=True)
class SphereInversion:
    """x -> center + radius^2 (x - center) / |x - center|^2."""

    center: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        if not (self.radius > 0):
            raise InputError(f"inversion radius must be positive, got {self.radius}")

    def _shifted(self, pts):
        y = np.asarray(pts, dtype=float) - self.center
        n2 = np.sum(y * y, axis=-1)
        if np.any(np.sqrt(n2) <= POLE_TOL * self.radius):
            bad = np.argmin(n2)
            raise PoleHitError(
                f"point {np.asarray(pts).reshape(-1, self.center.size)[bad]} hits the "
                f"inversion center {self.center}", point=self.center)
        return y, n2

    def apply(self, pts):
        y, n2 = self._shifted(pts)
        return self.center + self.radius ** 2 * y / n2[..., None]

    def apply_tangent(self, pts, tangents):
        y, n2 = self._shifted(pts)
        proj = np.sum(y * tangents, axis=-1, keepdims=True)
        return self.radius ** 2 * (tangents / n2[..., None]
                                   - 2.0 * proj * y / (n2 ** 2)[..., None])

    def to_json_obj(self):
        return {"type": "inversion", "center": self.center.tolist(),
                "radius": self.radius}


_PRIMITIVES = {
    "translation": lambda o: Translation(np.asarray(o["vector"], dtype=float)),
    "orthogonal": lambda o: Orthogonal(np.asarray(o["matrix"], dtype=float)),
    "scaling": lambda o: Scaling(float(o["factor"])),
    "inversion": lambda o: SphereInversion(np.asarray(o["center"], dtype=float),
                                           float(o["radius"])),
}


class MoebiusTransform:
    """Left-to-right composition of primitive conformal maps.

    ``apply`` runs the primitives in list order, so the first entry acts
    directly on the input data.  An empty list is the identity.
    """

    def __init__(self, primitives=()):
        self.primitives = tuple(primitives)

    def __repr__(self):
        kinds = ",".join(type(p).__name__ for p in self.primitives)
        return f"MoebiusTransform([{kinds}])"

    def apply(self, x) -> np.ndarray:
        return self.apply_points(as_vector(x))

    def apply_points(self, pts) -> np.ndarray:
        out = np.asarray(pts, dtype=float)
        for k, prim in enumerate(self.primitives):
            try:
                out = prim.apply(out)
            except PoleHitError as exc:
                raise PoleHitError(f"primitive {k} ({type(prim).__name__}): {exc}",
                                   primitive_index=k, point=exc.point) from None
        return out

    def apply_with_tangents(self, pts, tangents):
        p = np.asarray(pts, dtype=float)
        t = np.asarray(tangents, dtype=float)
        for k, prim in enumerate(self.primitives):
            try:
                t = prim.apply_tangent(p, t)
                p = prim.apply(p)
            except PoleHitError as exc:
                raise PoleHitError(f"primitive {k} ({type(prim).__name__}): {exc}",
                                   primitive_index=k, point=exc.point) from None
        return p, t

    def apply_polygon(self, p: ClosedPolygon) -> ClosedPolygon:
        """Image polygon; parameter values are preserved."""
        return ClosedPolygon(self.apply_points(p.vertices), p.thetas)

    def apply_curve(self, f):
        """Image curve with the exact chain-rule derivative."""
        from .curves import ParametricCurve

        def pos(x):
            return self.apply_points(f.position(x))

        def der(x):
            _, t = self.apply_with_tangents(f.position(x), f.derivative(x))
            return t

        return ParametricCurve(pos, der, dim=f.dim, name=f"moebius({f.name})",
                               params=f.params, check=False)

    def to_json_obj(self) -> list:
        return [p.to_json_obj() for p in self.primitives]

    @classmethod
    def from_json_obj(cls, obj) -> "MoebiusTransform":
        prims = []
        for rec in obj:
            kind = rec.get("type")
            if kind not in _PRIMITIVES:
                raise InputError(f"unknown primitive type {kind!r}")
            prims.append(_PRIMITIVES[kind](rec))
        return cls(prims)

    def save_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj(), indent=2) + "\n")

    @classmethod
    def load_json(cls, path) -> "MoebiusTransform":
        return cls.from_json_obj(json.loads(Path(path).read_text()))


def unit_sphere_inversion(dim: int = 3) -> MoebiusTransform:
    return MoebiusTransform([SphereInversion(np.zeros(dim), 1.0)])


def chord_identity_check(x, y) -> tuple[float, float]:
    """Both sides of |I(x) - I(y)|^2 = |x - y|^2 / (|x|^2 |y|^2).

    I is the unit-sphere inversion; lhs is evaluated through it, rhs from
    the stated right-hand side, so tests can assert their agreement.
    """
    x = as_vector(x)
    y = as_vector(y, dim=x.size)
    nx = float(np.linalg.norm(x))
    ny = float(np.linalg.norm(y))
    if nx == 0.0 or ny == 0.0:
        raise PoleHitError("unit-sphere inversion is undefined at the origin")
    if np.linalg.norm(x - y) <= COINCIDENT_TOL * max(1.0, nx, ny):
        raise CoincidentPointsError("identity needs two distinct points")
    inv = SphereInversion(np.zeros(x.size), 1.0)
    lhs = float(np.sum((inv.apply(x) - inv.apply(y)) ** 2))
    rhs = float(np.sum((x - y) ** 2)) / (nx ** 2 * ny ** 2)
    return lhs, rhs


def cross_ratio(p: ClosedPolygon, i: int, j: int) -> float:
    """Moebius-invariant ratio |e_i| |e_j| / (|v_j - v_i| |v_{j+1} - v_{i+1}|).

    Defined for vertex pairs with cyclic index distance > 1, where the four
    involved vertices are pairwise distinct on a simple polygon.
    """
    m = p.m
    if cyclic_index_distance(m, i % m, j % m) <= 1:
        raise AdjacencyError(f"cross ratio needs d_m(i,j) > 1, got ({i}, {j}) with m={m}")
    num = float(p.edge_lengths[i % m] * p.edge_lengths[j % m])
    den_a = float(np.linalg.norm(p.edge_diff(i, j)))
    den_b = float(np.linalg.norm(p.edge_diff(i + 1, j + 1)))
    scale = max(1.0, float(np.max(np.abs(p.vertices))))
    if min(den_a, den_b) <= COINCIDENT_TOL * scale:
        raise CoincidentPointsError(f"vertices of pair ({i}, {j}) coincide")
    return num / (den_a * den_b)


def random_transform(rng, avoid, margin: float, max_tries: int = 200) -> MoebiusTransform:
    """Seeded random transform whose inversion center keeps its distance.

    Composition applied in order: sphere inversion, scaling, orthogonal map,
    translation.  The inversion center is rejection-sampled until it is at
    least *margin* away from every point in *avoid*; deterministic for a
    given seed or Generator.

    Parameters
    ----------
    rng : int or numpy.random.Generator
    avoid : array-like, shape (k, n)
        Points the inversion center must stay away from.
    margin : float
        Minimal center-to-data distance; must be positive.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    pts = np.asarray(avoid, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise InputError("avoid must be a non-empty (k, n) point array")
    if not (margin > 0):
        raise InputError(f"margin must be positive, got {margin}")
    dim = pts.shape[1]
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    mid = 0.5 * (lo + hi)
    span = float(np.max(hi - lo)) or 1.0

    # proposal box tied to the data span keeps inverted energies conditioned;
    # margins beyond ~2.5 spans are genuinely unplaceable and error out
    center = None
    for _ in range(max_tries):
        cand = mid + rng.uniform(-1.5, 1.5, size=dim) * span
        if np.min(np.linalg.norm(pts - cand, axis=1)) >= margin:
            center = cand
            break
    if center is None:
        raise GeometryError(
            f"could not place an inversion center {margin} away from "
            f"{pts.shape[0]} points in {max_tries} tries")

    radius = span * rng.uniform(0.5, 1.5)
    factor = float(np.exp(rng.uniform(-np.log(2.0), np.log(2.0))))
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    shift = rng.uniform(-span, span, size=dim)
    return MoebiusTransform([
        SphereInversion(center, radius),
        Scaling(factor),
        Orthogonal(q),
        Translation(shift),
    ])
