"""Backend agreement: the compiled kernels against the NumPy reference."""

import numpy as np
import pytest

import knotenergy._reference as ref
from knotenergy import kernels

from conftest import perturbed_ngon, random_theta_polygon

compiled = pytest.importorskip(
    "knotenergy._speedups", reason="compiled kernels not built")


def polygons():
    out = [perturbed_ngon(m, 0.1, seed=m).vertices for m in (4, 5, 8, 16, 33, 64)]
    out.append(random_theta_polygon(12, seed=1).vertices)
    out.append(perturbed_ngon(10, 0.05, seed=9, dim=4).vertices)  # generic dim
    return out


@pytest.mark.parametrize("name", ["ecos_sum", "kim_kusner_sum", "simon_md_sum"])
def test_sums_agree(name):
    for v in polygons():
        a = getattr(ref, name)(v)
        b = getattr(compiled, name)(v)
        assert a[1:] == b[1:]  # status and pair indices
        assert b[0] == pytest.approx(a[0], rel=1e-13)


def test_terms_agree():
    for v in polygons():
        (data_a, code_a, *_), (data_b, code_b, *_) = ref.ecos_terms(v), compiled.ecos_terms(v)
        assert code_a == code_b == ref.OK
        np.testing.assert_array_equal(data_a[0], data_b[0])
        np.testing.assert_array_equal(data_a[1], data_b[1])
        for x, y in zip(data_a[2:], data_b[2:]):
            np.testing.assert_allclose(x, y, rtol=1e-13, atol=1e-15)


def test_error_codes_agree():
    v = perturbed_ngon(8, 0.05, seed=2).vertices.copy()
    v[4] = v[0]
    for impl in (ref, compiled):
        value, code, bi, bj = impl.ecos_sum(v)
        assert code == ref.ERR_COINCIDENT
        assert (bi, bj) == (0, 4) or (bi, bj) == (0, 3)

    bowtie = np.array([[0, 0, 0], [1, 1, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
    for impl in (ref, compiled):
        value, code, bi, bj = impl.simon_md_sum(bowtie)
        assert code == ref.ERR_TOUCHING
        assert (bi, bj) == (0, 2)


def test_bitwise_determinism():
    v = perturbed_ngon(32, 0.1, seed=5).vertices
    for impl in (ref, compiled):
        values = {impl.ecos_sum(v)[0] for _ in range(5)}
        assert len(values) == 1


def test_selected_backend_exposed():
    assert kernels.backend_name() in ("python", "cython")
    assert callable(kernels.ecos_sum)
