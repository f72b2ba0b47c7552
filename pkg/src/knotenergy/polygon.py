"""Closed polygons as piecewise-linear maps R/Z -> R^n.

A polygon stores both the parameter values theta_i and the vertices: the
Moebius-invariant discrete energy reads only vertices, but the arc-length
weighted discretization and the integral-representation density need the
theta gaps, so one type serves all of them.  Index arithmetic is cyclic
(mod m) everywhere; ``i + 1`` always means the cyclic successor.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import CoincidentPointsError, GeometryError, InputError
from .vecgeom import COINCIDENT_TOL


def cyclic_index_distance(m: int, i: int, j: int) -> int:
    """Cyclic distance ``min(|i - j|, m - |i - j|)`` between vertex indices."""
    if not (0 <= i < m and 0 <= j < m):
        raise IndexError(f"indices ({i}, {j}) out of range for m={m}")
    d = abs(i - j)
    return min(d, m - d)


class ClosedPolygon:
    """Immutable closed polygon with m >= 3 vertices in R^n.

    Parameters
    ----------
    vertices : array-like, shape (m, n)
        Vertex positions; consecutive vertices must be distinct.
    thetas : array-like, shape (m,), optional
        Strictly increasing parameter values in [0, 1).  Defaults to the
        equipartition k/m.
    """

    def __init__(self, vertices, thetas=None):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] < 2:
            raise GeometryError(f"need at least 3 vertices in R^(n>=2), got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise GeometryError("vertices contain non-finite coordinates")
        m = v.shape[0]
        if thetas is None:
            t = np.arange(m, dtype=float) / m
        else:
            t = np.asarray(thetas, dtype=float)
            if t.shape != (m,):
                raise GeometryError(f"thetas shape {t.shape} does not match {m} vertices")
            if not (np.all(np.diff(t) > 0) and 0.0 <= t[0] and t[-1] < 1.0):
                raise GeometryError("thetas must be strictly increasing within [0, 1)")

        self._vertices = v
        self._thetas = t
        self._edges = np.roll(v, -1, axis=0) - v
        self._edge_lengths = np.linalg.norm(self._edges, axis=1)
        scale = max(1.0, float(np.max(np.linalg.norm(v, axis=1))))
        if np.any(self._edge_lengths <= COINCIDENT_TOL * scale):
            k = int(np.argmin(self._edge_lengths))
            raise CoincidentPointsError(
                f"consecutive vertices {k} and {(k + 1) % m} coincide")
        self._cum_lengths = np.concatenate([[0.0], np.cumsum(self._edge_lengths)])
        gaps = np.diff(t)
        self._theta_gaps = np.concatenate([gaps, [1.0 + t[0] - t[-1]]])
        for arr in (self._vertices, self._thetas, self._edges,
                    self._edge_lengths, self._cum_lengths, self._theta_gaps):
            arr.setflags(write=False)

    # -- basic accessors ---------------------------------------------------

    @property
    def m(self) -> int:
        return self._vertices.shape[0]

    @property
    def dim(self) -> int:
        return self._vertices.shape[1]

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    @property
    def thetas(self) -> np.ndarray:
        return self._thetas

    @property
    def edge_lengths(self) -> np.ndarray:
        return self._edge_lengths

    @property
    def theta_gaps(self) -> np.ndarray:
        """Cyclic parameter gaps theta_{i+1} - theta_i (wraps past 1)."""
        return self._theta_gaps

    @property
    def total_length(self) -> float:
        return float(self._cum_lengths[-1])

    def __repr__(self) -> str:
        return f"ClosedPolygon(m={self.m}, dim={self.dim})"

    # -- geometry ----------------------------------------------------------

    def fineness(self) -> float:
        """Maximal cyclic parameter gap between consecutive vertices."""
        return float(np.max(self._theta_gaps))

    def diameter(self) -> float:
        """Largest vertex-to-vertex distance."""
        v = self._vertices
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(np.max(d2)))

    def edge_diff(self, i: int, j: int) -> np.ndarray:
        """Vertex difference p(theta_j) - p(theta_i), indices taken mod m."""
        m = self.m
        return self._vertices[j % m] - self._vertices[i % m]

    def arc_distance(self, i: int, j: int) -> float:
        """Shorter along-polygon path length between vertices i and j."""
        m = self.m
        d = abs(self._cum_lengths[j % m] - self._cum_lengths[i % m])
        return float(min(d, self.total_length - d))

    def point_at(self, x) -> np.ndarray:
        """Evaluate the piecewise-linear map at parameter x (mod 1)."""
        x = np.asarray(x, dtype=float) % 1.0
        i = self.cell_index(x)
        t0 = self._thetas[i]
        # wrap cell starts at theta_m - 1 when x < theta_0
        t0 = np.where(x < t0, t0 - 1.0, t0)
        frac = (x - t0) / self._theta_gaps[i]
        return self._vertices[i] + frac[..., None] * self._edges[i]

    def cell_index(self, x):
        """Index i with x in the half-open cell [theta_i, theta_{i+1})."""
        x = np.asarray(x, dtype=float) % 1.0
        i = np.searchsorted(self._thetas, x, side="right") - 1
        return np.where(i < 0, self.m - 1, i)

    def speed_in_cell(self, i) -> np.ndarray:
        """Constant |p'| inside cell i: edge length over theta gap."""
        return self._edge_lengths[i] / self._theta_gaps[i]

    def validate(self) -> None:
        """Check that all vertices are pairwise distinct (raises if not)."""
        v = self._vertices
        scale = max(1.0, float(np.max(np.linalg.norm(v, axis=1))))
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
        np.fill_diagonal(d2, np.inf)
        k = int(np.argmin(d2))
        i, j = divmod(k, self.m)
        if d2[i, j] <= (COINCIDENT_TOL * scale) ** 2:
            raise CoincidentPointsError(f"vertices {i} and {j} coincide")

    def with_vertices(self, vertices) -> "ClosedPolygon":
        """Same parameter values, new vertex positions."""
        return ClosedPolygon(vertices, self._thetas)


def fineness(p: ClosedPolygon) -> float:
    return p.fineness()


def regular_ngon(m: int, radius: float = 1.0, dim: int = 3) -> ClosedPolygon:
    """Regular m-gon inscribed in a circle in the first two coordinates."""
    if m < 3:
        raise GeometryError(f"need m >= 3, got {m}")
    if radius <= 0 or dim < 2:
        raise GeometryError("radius must be positive and dim >= 2")
    t = 2.0 * np.pi * np.arange(m) / m
    v = np.zeros((m, dim))
    v[:, 0] = radius * np.cos(t)
    v[:, 1] = radius * np.sin(t)
    return ClosedPolygon(v)


def inscribe(curve, m: int, partition: str = "parameter") -> ClosedPolygon:
    """Polygon with vertices on *curve* at m partition points.

    ``partition="parameter"`` samples theta_k = k/m (fineness exactly 1/m);
    ``partition="arclength"`` places the theta_k at equal arc-length spacing,
    solved by bisection on the curve's cumulative arc-length table.
    """
    if m < 3:
        raise GeometryError(f"need m >= 3, got {m}")
    if partition in ("parameter", "parameter-uniform"):
        thetas = np.arange(m, dtype=float) / m
    elif partition in ("arclength", "arclength-uniform"):
        total = curve.total_length()
        targets = total * np.arange(m) / m
        thetas = np.empty(m)
        thetas[0] = 0.0
        for k in range(1, m):
            lo, hi = 0.0, 1.0
            while hi - lo > 1e-10:
                mid = 0.5 * (lo + hi)
                if curve.cumulative_length(mid) < targets[k]:
                    lo = mid
                else:
                    hi = mid
            thetas[k] = 0.5 * (lo + hi)
    else:
        raise InputError(f"unknown partition {partition!r}")
    p = ClosedPolygon(curve.position(thetas), thetas)
    p.validate()
    return p


# -- file formats ----------------------------------------------------------
#
# JSON: {"dim": n, "thetas": [...], "vertices": [[...], ...]}; "thetas" is
# optional and defaults to the equipartition.  CSV: one vertex per row.


def polygon_to_dict(p: ClosedPolygon) -> dict:
    return {
        "dim": p.dim,
        "thetas": p.thetas.tolist(),
        "vertices": p.vertices.tolist(),
    }


def polygon_from_dict(obj: dict) -> ClosedPolygon:
    try:
        vertices = obj["vertices"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"polygon JSON needs a 'vertices' field: {exc}") from exc
    thetas = obj.get("thetas")
    p = ClosedPolygon(vertices, thetas)
    dim = obj.get("dim")
    if dim is not None and dim != p.dim:
        raise InputError(f"declared dim {dim} does not match vertex dim {p.dim}")
    return p


def save_polygon_json(p: ClosedPolygon, path) -> None:
    Path(path).write_text(json.dumps(polygon_to_dict(p), indent=2) + "\n")


def save_polygon_csv(p: ClosedPolygon, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in p.vertices:
            writer.writerow([repr(float(x)) for x in row])


def load_polygon(path) -> ClosedPolygon:
    """Load a polygon from a .json or .csv file (format by extension)."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    if path.suffix.lower() == ".json":
        try:
            obj = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON in {path}: {exc}") from exc
        return polygon_from_dict(obj)
    if path.suffix.lower() == ".csv":
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if row:
                    rows.append([float(x) for x in row])
        return ClosedPolygon(rows)
    raise InputError(f"unsupported polygon file extension: {path.suffix!r}")
