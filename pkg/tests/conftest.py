import numpy as np
import pytest

from knotenergy import ClosedPolygon, regular_ngon


def perturbed_ngon(m: int, scale: float, seed: int, dim: int = 3) -> ClosedPolygon:
    """Regular m-gon with seeded Gaussian vertex jitter (stays simple for
    scale well below the edge length)."""
    rng = np.random.default_rng(seed)
    base = regular_ngon(m, radius=1.0, dim=dim)
    return base.with_vertices(base.vertices + scale * rng.standard_normal((m, dim)))


def random_theta_polygon(m: int, seed: int, dim: int = 3) -> ClosedPolygon:
    """Perturbed m-gon with non-uniform, well-separated parameter values."""
    rng = np.random.default_rng(seed)
    gaps = rng.uniform(0.5, 1.5, size=m)
    thetas = np.concatenate([[0.0], np.cumsum(gaps)[:-1]]) / np.sum(gaps)
    vertices = perturbed_ngon(m, 0.05, seed + 1, dim=dim).vertices
    return ClosedPolygon(vertices, thetas)


@pytest.fixture
def unit_square() -> ClosedPolygon:
    return ClosedPolygon([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
