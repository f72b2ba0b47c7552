# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the polygon energy pair sums.

Twin of ``_reference.py``: identical signatures, iteration order, status
codes, and tolerances.  Accumulation uses Neumaier compensated summation in
fixed row-major pair order, so repeated runs are bit-identical.
"""

from libc.math cimport fabs, sqrt

import numpy as np

DEF DEGENERATE_TOL = 1e-14
DEF COS_SLACK = 1e-12
DEF NEG_TERM_SLACK = 1e-12
DEF MD_TOL = 1e-12

cdef enum Status:
    S_OK = 0
    S_COINCIDENT = 1
    S_COSINE = 2
    S_NEGATIVE = 3
    S_TOUCHING = 4

OK = S_OK
ERR_COINCIDENT = S_COINCIDENT
ERR_COSINE = S_COSINE
ERR_NEGATIVE = S_NEGATIVE
ERR_TOUCHING = S_TOUCHING


cdef inline void _acc(double x, double* s, double* comp) noexcept nogil:
    # Neumaier error-free accumulation
    cdef double t = s[0] + x
    if fabs(s[0]) >= fabs(x):
        comp[0] += (s[0] - t) + x
    else:
        comp[0] += (x - t) + s[0]
    s[0] = t


cdef inline double _clamp01(double x) noexcept nogil:
    if x > 1.0:
        return 1.0
    if x < -1.0:
        return -1.0
    return x


cdef inline double _vertex_scale(const double[:, ::1] v) noexcept nogil:
    cdef Py_ssize_t i, c
    cdef double n2, best = 1.0
    for i in range(v.shape[0]):
        n2 = 0.0
        for c in range(v.shape[1]):
            n2 += v[i, c] * v[i, c]
        n2 = sqrt(n2)
        if n2 > best:
            best = n2
    return best


cdef int _pair_term(const double[:, ::1] v, Py_ssize_t i, Py_ssize_t j, double tol,
                    double* cr, double* cos_a, double* cos_at,
                    double* contrib) noexcept nogil:
    cdef Py_ssize_t m = v.shape[0]
    cdef Py_ssize_t n = v.shape[1]
    cdef Py_ssize_t i1 = (i + 1) % m
    cdef Py_ssize_t j1 = (j + 1) % m
    cdef double di, dj, dij, di1j, dij1, di1j1
    cdef double li2 = 0, lj2 = 0, didj = 0
    cdef double nij2 = 0, ni1j2 = 0, nij12 = 0, ni1j12 = 0
    cdef double di1j_di = 0, dij_dj = 0, dij_di = 0, dij1_dj = 0
    cdef double dij1_di = 0, di1j1_dj = 0, di1j1_di = 0, di1j_dj = 0
    cdef Py_ssize_t c
    for c in range(n):
        di = v[i1, c] - v[i, c]
        dj = v[j1, c] - v[j, c]
        dij = v[j, c] - v[i, c]
        di1j = v[j, c] - v[i1, c]
        dij1 = v[j1, c] - v[i, c]
        di1j1 = v[j1, c] - v[i1, c]
        li2 += di * di
        lj2 += dj * dj
        didj += di * dj
        nij2 += dij * dij
        ni1j2 += di1j * di1j
        nij12 += dij1 * dij1
        ni1j12 += di1j1 * di1j1
        di1j_di += di1j * di
        dij_dj += dij * dj
        dij_di += dij * di
        dij1_dj += dij1 * dj
        dij1_di += dij1 * di
        di1j1_dj += di1j1 * dj
        di1j1_di += di1j1 * di
        di1j_dj += di1j * dj

    cdef double li = sqrt(li2)
    cdef double lj = sqrt(lj2)
    cdef double n_ij = sqrt(nij2)
    cdef double n_i1j = sqrt(ni1j2)
    cdef double n_ij1 = sqrt(nij12)
    cdef double n_i1j1 = sqrt(ni1j12)
    cdef double small = li
    if lj < small: small = lj
    if n_ij < small: small = n_ij
    if n_i1j < small: small = n_i1j
    if n_ij1 < small: small = n_ij1
    if n_i1j1 < small: small = n_i1j1
    if small <= tol:
        return S_COINCIDENT

    cdef double lilj = li * lj
    cdef double ca = ((di1j_di / li) * (dij_dj / lj)
                      + (dij_di / li) * (dij1_dj / lj)
                      - nij2 * (didj / lilj) - lilj) / (n_i1j * n_ij1)
    cdef double cat = ((dij1_di / li) * (di1j1_dj / lj)
                       + (di1j1_di / li) * (di1j_dj / lj)
                       - ni1j12 * (didj / lilj) - lilj) / (n_ij1 * n_i1j)
    if fabs(ca) > 1.0 + COS_SLACK or fabs(cat) > 1.0 + COS_SLACK:
        return S_COSINE

    cr[0] = lilj / (n_ij * n_i1j1)
    cos_a[0] = ca
    cos_at[0] = cat
    cdef double term = cr[0] * (1.0 - 0.5 * (_clamp01(ca) + _clamp01(cat)))
    if term < -NEG_TERM_SLACK:
        return S_NEGATIVE
    if term < 0.0:
        term = 0.0
    contrib[0] = term
    return S_OK


def ecos_sum(v):
    """Moebius-invariant discrete energy of the vertex array (m, n)."""
    cdef const double[:, ::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t m = vv.shape[0]
    cdef double tol = DEGENERATE_TOL * _vertex_scale(vv)
    cdef double s = 0.0, comp = 0.0
    cdef double cr, ca, cat, term
    cdef Py_ssize_t i, j, d
    cdef int code
    for i in range(m):
        for j in range(m):
            d = j - i if j >= i else i - j
            if d < m - d:
                pass
            else:
                d = m - d
            if d <= 1:
                continue
            code = _pair_term(vv, i, j, tol, &cr, &ca, &cat, &term)
            if code != S_OK:
                return 0.0, code, i, j
            _acc(term, &s, &comp)
    return s + comp, OK, -1, -1


def ecos_terms(v):
    """Per-pair arrays (ii, jj, cross_ratio, cos_a, cos_a_tilde, contrib)."""
    cdef const double[:, ::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t m = vv.shape[0]
    cdef Py_ssize_t count = m * (m - 3) if m >= 4 else 0
    ii = np.empty(count, dtype=np.intp)
    jj = np.empty(count, dtype=np.intp)
    cr_arr = np.empty(count, dtype=np.float64)
    ca_arr = np.empty(count, dtype=np.float64)
    cat_arr = np.empty(count, dtype=np.float64)
    contrib_arr = np.empty(count, dtype=np.float64)
    cdef Py_ssize_t[::1] ii_v = ii
    cdef Py_ssize_t[::1] jj_v = jj
    cdef double[::1] cr_v = cr_arr
    cdef double[::1] ca_v = ca_arr
    cdef double[::1] cat_v = cat_arr
    cdef double[::1] contrib_v = contrib_arr
    cdef double tol = DEGENERATE_TOL * _vertex_scale(vv)
    cdef double cr, ca, cat, term
    cdef Py_ssize_t i, j, d, k = 0
    cdef int code
    for i in range(m):
        for j in range(m):
            d = j - i if j >= i else i - j
            if m - d < d:
                d = m - d
            if d <= 1:
                continue
            code = _pair_term(vv, i, j, tol, &cr, &ca, &cat, &term)
            if code != S_OK:
                return None, code, i, j
            ii_v[k] = i
            jj_v[k] = j
            cr_v[k] = cr
            ca_v[k] = ca
            cat_v[k] = cat
            contrib_v[k] = term
            k += 1
    return (ii, jj, cr_arr, ca_arr, cat_arr, contrib_arr), OK, -1, -1


def kim_kusner_sum(v):
    """Arc-length weighted inverse-square discretization over ordered pairs."""
    cdef const double[:, ::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t m = vv.shape[0]
    cdef Py_ssize_t n = vv.shape[1]
    cum_arr = np.empty(m, dtype=np.float64)
    w_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] cum = cum_arr
    cdef double[::1] w = w_arr
    cdef Py_ssize_t i, j, c, i1
    cdef double el, acc = 0.0, total, diff, chord2, arc, d
    for i in range(m):
        cum[i] = acc
        i1 = (i + 1) % m
        el = 0.0
        for c in range(n):
            diff = vv[i1, c] - vv[i, c]
            el += diff * diff
        el = sqrt(el)
        w[i] = el
        acc += el
    total = acc
    for i in range(m):
        if total - w[i] < w[i]:
            w[i] = total - w[i]

    cdef double tol = DEGENERATE_TOL * _vertex_scale(vv)
    cdef double s = 0.0, comp = 0.0
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            chord2 = 0.0
            for c in range(n):
                diff = vv[j, c] - vv[i, c]
                chord2 += diff * diff
            if chord2 <= tol * tol:
                return 0.0, ERR_COINCIDENT, i, j
            d = fabs(cum[j] - cum[i])
            arc = d if d < total - d else total - d
            _acc((1.0 / chord2 - 1.0 / (arc * arc)) * w[i] * w[j], &s, &comp)
    return s + comp, OK, -1, -1


cdef double _seg_dist(const double[:, ::1] v, Py_ssize_t p1, Py_ssize_t q1,
                      Py_ssize_t p2, Py_ssize_t q2) noexcept nogil:
    cdef Py_ssize_t n = v.shape[1]
    cdef double a = 0, e = 0, b = 0, c = 0, f = 0
    cdef double d1, d2, r
    cdef Py_ssize_t k
    for k in range(n):
        d1 = v[q1, k] - v[p1, k]
        d2 = v[q2, k] - v[p2, k]
        r = v[p1, k] - v[p2, k]
        a += d1 * d1
        e += d2 * d2
        b += d1 * d2
        c += d1 * r
        f += d2 * r
    cdef double denom = a * e - b * b
    cdef double s = 0.0
    cdef double t
    if denom > 0.0:
        s = (b * f - c * e) / denom
        if s < 0.0: s = 0.0
        elif s > 1.0: s = 1.0
    t = (b * s + f) / e
    if t < 0.0:
        t = 0.0
        s = -c / a
        if s < 0.0: s = 0.0
        elif s > 1.0: s = 1.0
    elif t > 1.0:
        t = 1.0
        s = (b - c) / a
        if s < 0.0: s = 0.0
        elif s > 1.0: s = 1.0
    cdef double dist2 = 0.0
    for k in range(n):
        d1 = (v[p1, k] + s * (v[q1, k] - v[p1, k])
              - v[p2, k] - t * (v[q2, k] - v[p2, k]))
        dist2 += d1 * d1
    return sqrt(dist2)


def simon_md_sum(v):
    """Minimal-distance energy over unordered non-consecutive edge pairs."""
    cdef const double[:, ::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t m = vv.shape[0]
    cdef Py_ssize_t n = vv.shape[1]
    el_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] el = el_arr
    cdef Py_ssize_t i, j, c
    cdef double diff, acc, total = 0.0
    for i in range(m):
        acc = 0.0
        for c in range(n):
            diff = vv[(i + 1) % m, c] - vv[i, c]
            acc += diff * diff
        el[i] = sqrt(acc)
        total += el[i]

    cdef double s = 0.0, comp = 0.0, md
    for i in range(m):
        for j in range(i + 2, m):
            if i == 0 and j == m - 1:
                continue
            md = _seg_dist(vv, i, (i + 1) % m, j, (j + 1) % m)
            if md <= MD_TOL * total:
                return 0.0, ERR_TOUCHING, i, j
            _acc(el[i] * el[j] / (md * md), &s, &comp)
    return s + comp, OK, -1, -1
