"""Kernel backend selection: compiled extension with pure-Python fallback.

The compiled kernels (``_speedups``, built from Cython) are preferred when
importable; otherwise the NumPy reference implementation is used.  Set
``KNOTENERGY_BACKEND=python`` or ``=cython`` to force one side (forcing
``cython`` raises if the extension is missing instead of silently falling
back).  Both backends honor the same deterministic-summation contract and
agree to ~1e-15 relative; ``benchmarks/bench_kernels.py`` compares their
speed.
"""

from __future__ import annotations

import os

from . import _reference

_requested = os.environ.get("KNOTENERGY_BACKEND", "auto").strip().lower()

if _requested in ("auto", ""):
    try:
        from . import _speedups as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _reference
        BACKEND = "python"
elif _requested in ("python", "pure", "numpy"):
    _impl = _reference
    BACKEND = "python"
elif _requested in ("cython", "compiled"):
    from . import _speedups as _impl
    BACKEND = "cython"
else:
    raise ImportError(f"unknown KNOTENERGY_BACKEND value {_requested!r}")

OK = _reference.OK
ERR_COINCIDENT = _reference.ERR_COINCIDENT
ERR_COSINE = _reference.ERR_COSINE
ERR_NEGATIVE = _reference.ERR_NEGATIVE
ERR_TOUCHING = _reference.ERR_TOUCHING

ecos_sum = _impl.ecos_sum
ecos_terms = _impl.ecos_terms
kim_kusner_sum = _impl.kim_kusner_sum
simon_md_sum = _impl.simon_md_sum


def backend_name() -> str:
    return BACKEND
