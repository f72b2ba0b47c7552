"""Discrete energies of closed polygons.

Three polygon energies live here:

* the Moebius-invariant energy built from cross ratios and the meeting
  angles of vertex-triple circles, with closed-form cosines (dot products
  and norms only, so degenerate circles-as-lines need no special casing);
* the arc-length weighted inverse-square discretization over vertex pairs;
* the minimal-distance energy over non-consecutive edge pairs.

The normative Moebius-invariant sum runs over ordered index pairs (i, j)
with cyclic distance > 1, matching its double-integral representation;
per-term i <-> j symmetry is exact, so the ordered value is twice the
unordered one.  The piecewise-constant density whose exact cell integral
reproduces the energy is exposed as :func:`e_cos_m_density`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import (
    AdjacencyError,
    CoincidentPointsError,
    GeometryError,
    SelfIntersectionError,
)
from .polygon import ClosedPolygon, cyclic_index_distance


@dataclass(frozen=True)
class PairTerm:
    """One ordered-pair summand of the Moebius-invariant energy."""

    i: int
    j: int
    cross_ratio: float
    cos_alpha: float
    cos_alpha_tilde: float
    contribution: float


@dataclass(frozen=True)
class EnergyReport:
    """Energy value plus provenance; optionally the per-pair terms."""

    energy: str
    value: float
    term_count: int
    m: int
    fineness: float
    terms: tuple[PairTerm, ...] | None = None

    def to_json_obj(self) -> dict:
        obj = {
            "energy": self.energy,
            "value": self.value,
            "m": self.m,
            "fineness": self.fineness,
            "term_count": self.term_count,
        }
        if self.terms is not None:
            obj["terms"] = [
                {"i": t.i, "j": t.j, "cross_ratio": t.cross_ratio,
                 "cos_alpha": t.cos_alpha, "cos_alpha_tilde": t.cos_alpha_tilde,
                 "contribution": t.contribution}
                for t in self.terms
            ]
        return obj

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj(), indent=2) + "\n")

    def write_csv(self, path) -> None:
        """One row per term (requires the report to carry terms)."""
        if self.terms is None:
            raise ValueError("report carries no per-pair terms; use JSON output")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "j", "cross_ratio", "cos_alpha",
                             "cos_alpha_tilde", "contribution"])
            for t in self.terms:
                writer.writerow([t.i, t.j, repr(float(t.cross_ratio)), repr(float(t.cos_alpha)),
                                 repr(float(t.cos_alpha_tilde)), repr(float(t.contribution))])


def _raise_for_code(code: int, i: int, j: int, what: str):
    if code == kernels.ERR_COINCIDENT:
        raise CoincidentPointsError(f"{what}: relevant points of pair ({i}, {j}) coincide")
    if code == kernels.ERR_COSINE:
        raise GeometryError(f"{what}: cosine out of [-1, 1] beyond rounding at pair ({i}, {j})")
    if code == kernels.ERR_NEGATIVE:
        raise GeometryError(f"{what}: negative term beyond rounding at pair ({i}, {j})")
    if code == kernels.ERR_TOUCHING:
        raise SelfIntersectionError(f"{what}: non-consecutive edges {i} and {j} touch")
    raise GeometryError(f"{what}: kernel error code {code} at pair ({i}, {j})")


# -- closed-form pair cosines -------------------------------------------------


def _check_pair(p: ClosedPolygon, i: int, j: int) -> tuple[int, int]:
    m = p.m
    i, j = i % m, j % m
    if cyclic_index_distance(m, i, j) <= 1:
        raise AdjacencyError(f"pair ({i}, {j}) needs cyclic distance > 1 (m={m})")
    return i, j


def _pair_cosines(v: np.ndarray, i: int, j: int) -> tuple[float, float, float]:
    """(cross_ratio, cos_alpha, cos_alpha_tilde) for one ordered pair."""
    m = v.shape[0]
    vi, vi1, vj, vj1 = v[i], v[(i + 1) % m], v[j], v[(j + 1) % m]
    di = vi1 - vi
    dj = vj1 - vj
    d_ij = vj - vi
    d_i1j = vj - vi1
    d_ij1 = vj1 - vi
    d_i1j1 = vj1 - vi1
    li = float(np.linalg.norm(di))
    lj = float(np.linalg.norm(dj))
    n_ij = float(np.linalg.norm(d_ij))
    n_i1j = float(np.linalg.norm(d_i1j))
    n_ij1 = float(np.linalg.norm(d_ij1))
    n_i1j1 = float(np.linalg.norm(d_i1j1))
    scale = max(1.0, float(np.max(np.linalg.norm(v, axis=1))))
    if min(li, lj, n_ij, n_i1j, n_ij1, n_i1j1) <= 1e-14 * scale:
        raise CoincidentPointsError(f"relevant points of pair ({i}, {j}) coincide")
    ui = di / li
    uj = dj / lj
    cos_a = (float(d_i1j @ ui) * float(d_ij @ uj)
             + float(d_ij @ ui) * float(d_ij1 @ uj)
             - n_ij ** 2 * float(ui @ uj) - li * lj) / (n_i1j * n_ij1)
    cos_at = (float(d_ij1 @ ui) * float(d_i1j1 @ uj)
              + float(d_i1j1 @ ui) * float(d_i1j @ uj)
              - n_i1j1 ** 2 * float(ui @ uj) - li * lj) / (n_ij1 * n_i1j)
    cr = li * lj / (n_ij * n_i1j1)
    return cr, cos_a, cos_at


def cos_alpha(p: ClosedPolygon, i: int, j: int) -> float:
    """Cosine of the meeting angle of the circles through (v_i, v_{i+1}, v_j)
    and (v_j, v_{j+1}, v_i), evaluated at v_j.

    Closed-form expansion; no circle is constructed.  Equals 1 whenever the
    four involved vertices are cocircular.
    """
    i, j = _check_pair(p, i, j)
    _, ca, _ = _pair_cosines(p.vertices, i, j)
    return min(1.0, max(-1.0, ca))


def cos_alpha_tilde(p: ClosedPolygon, i: int, j: int) -> float:
    """Cosine of the meeting angle of the circles through (v_i, v_{i+1},
    v_{j+1}) and (v_j, v_{j+1}, v_{i+1}), evaluated at v_{i+1}."""
    i, j = _check_pair(p, i, j)
    _, _, cat = _pair_cosines(p.vertices, i, j)
    return min(1.0, max(-1.0, cat))


# -- energies ------------------------------------------------------------------


def e_cos_m(p: ClosedPolygon, keep_terms: bool = False) -> EnergyReport:
    """Moebius-invariant discrete energy of a closed polygon.

    Sum over ordered pairs with cyclic index distance > 1 of
    ``cross_ratio * (1 - (cos_alpha + cos_alpha_tilde) / 2)``.  Nonnegative;
    zero exactly when all vertices lie on one circle.
    """
    if keep_terms:
        data, code, bi, bj = kernels.ecos_terms(p.vertices)
        if code != kernels.OK:
            _raise_for_code(code, bi, bj, "e_cos_m")
        ii, jj, cr, ca, cat, contrib = data
        terms = tuple(
            PairTerm(int(a), int(b), float(c), float(d), float(e), float(f))
            for a, b, c, d, e, f in zip(ii, jj, cr, ca, cat, contrib)
        )
        value = math.fsum(contrib)
    else:
        value, code, bi, bj = kernels.ecos_sum(p.vertices)
        if code != kernels.OK:
            _raise_for_code(code, bi, bj, "e_cos_m")
        terms = None
    n_terms = p.m * (p.m - 3) if p.m >= 4 else 0
    return EnergyReport(energy="ecos", value=float(value), term_count=n_terms,
                        m=p.m, fineness=p.fineness(), terms=terms)


def e_cos_m_value(vertices) -> float:
    """Fast path: energy value straight from a vertex array."""
    value, code, bi, bj = kernels.ecos_sum(np.asarray(vertices, dtype=float))
    if code != kernels.OK:
        _raise_for_code(code, bi, bj, "e_cos_m")
    return float(value)


def e_cos_m_density(p: ClosedPolygon, x: float, y: float) -> float:
    """Piecewise-constant integrand whose exact double integral over
    (R/Z)^2 equals :func:`e_cos_m`.

    On the parameter cell [theta_i, theta_{i+1}) x [theta_j, theta_{j+1})
    the value is the pair's angle factor over the two long chords times
    |p'(x)| |p'(y)|; cells with cyclic index distance <= 1 contribute 0.
    Cells are half-open, so values on cell boundaries belong to the cell on
    the right.
    """
    i = int(p.cell_index(float(x)))
    j = int(p.cell_index(float(y)))
    if cyclic_index_distance(p.m, i, j) <= 1:
        return 0.0
    v = p.vertices
    m = p.m
    cr, ca, cat = _pair_cosines(v, i, j)
    ca = min(1.0, max(-1.0, ca))
    cat = min(1.0, max(-1.0, cat))
    n_ij = float(np.linalg.norm(v[j] - v[i]))
    n_i1j1 = float(np.linalg.norm(v[(j + 1) % m] - v[(i + 1) % m]))
    angle_factor = (1.0 - 0.5 * (ca + cat)) / (n_ij * n_i1j1)
    return angle_factor * float(p.speed_in_cell(i)) * float(p.speed_in_cell(j))


def kim_kusner(p: ClosedPolygon) -> EnergyReport:
    """Inverse-square chord-minus-arc energy with edge arc-length weights.

    Sum over ordered pairs i != j; adjacent pairs contribute exactly zero
    on straight edges (chord equals along-polygon distance) and are kept
    for fidelity to the formula as written.
    """
    value, code, bi, bj = kernels.kim_kusner_sum(p.vertices)
    if code != kernels.OK:
        _raise_for_code(code, bi, bj, "kim_kusner")
    return EnergyReport(energy="kk", value=float(value),
                        term_count=p.m * (p.m - 1), m=p.m,
                        fineness=p.fineness())


def segment_min_distance(a1, a2, b1, b2) -> float:
    """Exact minimum distance between the closed segments [a1,a2], [b1,b2].

    Clamped quadratic minimization over the unit square of segment
    parameters; handles parallel and touching configurations.
    """
    a1 = np.asarray(a1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    scale = max(1.0, *(float(np.linalg.norm(z)) for z in (a1, a2, b1, b2)))
    if np.linalg.norm(a2 - a1) <= 1e-14 * scale or np.linalg.norm(b2 - b1) <= 1e-14 * scale:
        raise GeometryError("segments must be non-degenerate")
    from ._reference import _segment_distance

    return _segment_distance(a1, a2, b1, b2)


def simon_md(p: ClosedPolygon) -> EnergyReport:
    """Minimal-distance energy over unordered non-consecutive edge pairs."""
    value, code, bi, bj = kernels.simon_md_sum(p.vertices)
    if code != kernels.OK:
        _raise_for_code(code, bi, bj, "simon_md")
    m = p.m
    n_pairs = m * (m - 3) // 2
    return EnergyReport(energy="simon", value=float(value), term_count=n_pairs,
                        m=m, fineness=p.fineness())
