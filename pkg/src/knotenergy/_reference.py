"""Pure NumPy kernels for the polygon energy pair sums.

Reference implementation of the hot loops; a Cython twin with the same
call signatures lives in ``_speedups.pyx`` and is preferred at import time
when compiled.  Both iterate ordered vertex pairs in row-major (i, j)
order and accumulate with error-free summation (``math.fsum`` here,
Neumaier compensation in the compiled twin), so results are deterministic
run to run.

Status codes returned next to each value instead of raising (the wrapping
module turns them into typed exceptions):

    0  ok
    1  coincident points among the pair's six distances
    2  a cosine left [-1, 1] by more than COS_SLACK
    3  a term more negative than -NEG_TERM_SLACK
    4  non-consecutive segments touch (minimal-distance energy)
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

DEGENERATE_TOL = 1e-14  # relative to max(1, max vertex norm)
COS_SLACK = 1e-12       # tolerated rounding excursion of a cosine past +-1
NEG_TERM_SLACK = 1e-12  # tolerated rounding excursion of a term below 0
MD_TOL = 1e-12          # segment distance below MD_TOL * perimeter is a touch

OK = 0
ERR_COINCIDENT = 1
ERR_COSINE = 2
ERR_NEGATIVE = 3
ERR_TOUCHING = 4


@lru_cache(maxsize=64)
def _admissible_pairs(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Ordered (i, j) index arrays with cyclic distance > 1, row-major."""
    idx = np.arange(m)
    d = np.abs(idx[:, None] - idx[None, :])
    mask = np.minimum(d, m - d) > 1
    ii, jj = np.nonzero(mask)
    ii.setflags(write=False)
    jj.setflags(write=False)
    return ii, jj


def _pair_quantities(v: np.ndarray):
    m = v.shape[0]
    ii, jj = _admissible_pairs(m)
    vi = v[ii]
    vi1 = v[(ii + 1) % m]
    vj = v[jj]
    vj1 = v[(jj + 1) % m]

    di = vi1 - vi
    dj = vj1 - vj
    d_ij = vj - vi
    d_i1j = vj - vi1
    d_ij1 = vj1 - vi
    d_i1j1 = vj1 - vi1

    li = np.linalg.norm(di, axis=1)
    lj = np.linalg.norm(dj, axis=1)
    n_ij = np.linalg.norm(d_ij, axis=1)
    n_i1j = np.linalg.norm(d_i1j, axis=1)
    n_ij1 = np.linalg.norm(d_ij1, axis=1)
    n_i1j1 = np.linalg.norm(d_i1j1, axis=1)

    tol = DEGENERATE_TOL * max(1.0, float(np.max(np.linalg.norm(v, axis=1))))
    small = np.minimum.reduce([li, lj, n_ij, n_i1j, n_ij1, n_i1j1])
    if np.any(small <= tol):
        k = int(np.argmax(small <= tol))
        return None, (ERR_COINCIDENT, int(ii[k]), int(jj[k]))

    ui = di / li[:, None]
    uj = dj / lj[:, None]
    uij = np.sum(ui * uj, axis=1)

    cos_a = ((np.sum(d_i1j * ui, axis=1) * np.sum(d_ij * uj, axis=1)
              + np.sum(d_ij * ui, axis=1) * np.sum(d_ij1 * uj, axis=1)
              - n_ij ** 2 * uij - li * lj)
             / (n_i1j * n_ij1))
    cos_at = ((np.sum(d_ij1 * ui, axis=1) * np.sum(d_i1j1 * uj, axis=1)
               + np.sum(d_i1j1 * ui, axis=1) * np.sum(d_i1j * uj, axis=1)
               - n_i1j1 ** 2 * uij - li * lj)
              / (n_ij1 * n_i1j))

    worst = max(float(np.max(np.abs(cos_a))), float(np.max(np.abs(cos_at))))
    if worst > 1.0 + COS_SLACK:
        bad = np.maximum(np.abs(cos_a), np.abs(cos_at)) > 1.0 + COS_SLACK
        k = int(np.argmax(bad))
        return None, (ERR_COSINE, int(ii[k]), int(jj[k]))

    cr = li * lj / (n_ij * n_i1j1)
    contrib = cr * (1.0 - 0.5 * (np.clip(cos_a, -1.0, 1.0)
                                 + np.clip(cos_at, -1.0, 1.0)))
    if np.min(contrib, initial=0.0) < -NEG_TERM_SLACK:
        k = int(np.argmin(contrib))
        return None, (ERR_NEGATIVE, int(ii[k]), int(jj[k]))
    contrib = np.maximum(contrib, 0.0)
    return (ii, jj, cr, cos_a, cos_at, contrib), (OK, -1, -1)


def ecos_sum(v: np.ndarray):
    """Moebius-invariant discrete energy of the vertex array (m, n)."""
    data, (code, bi, bj) = _pair_quantities(np.ascontiguousarray(v, dtype=float))
    if code != OK:
        return 0.0, code, bi, bj
    return math.fsum(data[5]), OK, -1, -1


def ecos_terms(v: np.ndarray):
    """Per-pair arrays (ii, jj, cross_ratio, cos_a, cos_a_tilde, contrib)."""
    data, (code, bi, bj) = _pair_quantities(np.ascontiguousarray(v, dtype=float))
    if code != OK:
        return None, code, bi, bj
    return data, OK, -1, -1


def kim_kusner_sum(v: np.ndarray):
    """Arc-length weighted inverse-square discretization over ordered pairs."""
    v = np.ascontiguousarray(v, dtype=float)
    m = v.shape[0]
    edges = np.roll(v, -1, axis=0) - v
    el = np.linalg.norm(edges, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(el)])[:m]
    total = float(np.sum(el))
    w = np.minimum(el, total - el)

    chord2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
    tol2 = (DEGENERATE_TOL * max(1.0, float(np.max(np.linalg.norm(v, axis=1))))) ** 2
    off = ~np.eye(m, dtype=bool)
    if np.any(chord2[off] <= tol2):
        masked = np.where(off, chord2, np.inf)
        k = int(np.argmin(masked))
        return 0.0, ERR_COINCIDENT, k // m, k % m

    d = np.abs(cum[:, None] - cum[None, :])
    arc = np.minimum(d, total - d)
    np.fill_diagonal(chord2, 1.0)
    np.fill_diagonal(arc, 1.0)
    terms = (1.0 / chord2 - 1.0 / arc ** 2) * w[:, None] * w[None, :]
    return math.fsum(terms[off]), OK, -1, -1


def _segment_distance(p1, q1, p2, q2) -> float:
    """Minimal distance between closed segments [p1,q1] and [p2,q2]."""
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    b = float(d1 @ d2)
    c = float(d1 @ r)
    f = float(d2 @ r)
    denom = a * e - b * b
    s = min(max((b * f - c * e) / denom, 0.0), 1.0) if denom > 0.0 else 0.0
    t = (b * s + f) / e
    if t < 0.0:
        t = 0.0
        s = min(max(-c / a, 0.0), 1.0)
    elif t > 1.0:
        t = 1.0
        s = min(max((b - c) / a, 0.0), 1.0)
    diff = (p1 + s * d1) - (p2 + t * d2)
    return float(np.linalg.norm(diff))


def simon_md_sum(v: np.ndarray):
    """Minimal-distance energy over unordered non-consecutive edge pairs."""
    v = np.ascontiguousarray(v, dtype=float)
    m = v.shape[0]
    el = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
    total = float(np.sum(el))
    terms = []
    for i in range(m):
        for j in range(i + 2, m):
            if i == 0 and j == m - 1:
                continue
            md = _segment_distance(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m])
            if md <= MD_TOL * total:
                return 0.0, ERR_TOUCHING, i, j
            terms.append(el[i] * el[j] / (md * md))
    return math.fsum(terms), OK, -1, -1
