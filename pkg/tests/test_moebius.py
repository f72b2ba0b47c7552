import json
import math

import numpy as np
import pytest

from knotenergy import (
    MoebiusTransform,
    Orthogonal,
    Scaling,
    SphereInversion,
    Translation,
    chord_identity_check,
    circumcenter,
    circumradius,
    cross_ratio,
    random_transform,
    regular_ngon,
    unit_sphere_inversion,
)
from knotenergy.errors import (
    AdjacencyError,
    CoincidentPointsError,
    GeometryError,
    InputError,
    PoleHitError,
)

from conftest import perturbed_ngon


class TestApply:
    def test_unit_sphere_inversion(self):
        t = unit_sphere_inversion(3)
        assert t.apply([2, 0, 0]) == pytest.approx([0.5, 0, 0])

    def test_identity_empty_composition(self):
        t = MoebiusTransform()
        x = np.array([1.0, -2.0, 3.0])
        assert t.apply(x) == pytest.approx(x)

    def test_involution(self):
        t = unit_sphere_inversion(3)
        rng = np.random.default_rng(1)
        for _ in range(100):
            x = rng.uniform(-3, 3, size=3)
            if np.linalg.norm(x) < 1e-3:
                continue
            assert t.apply(t.apply(x)) == pytest.approx(x, rel=1e-12, abs=1e-12)

    def test_pole_hit_identifies_primitive(self):
        t = MoebiusTransform([Scaling(2.0), SphereInversion(np.array([2.0, 0.0, 0.0]))])
        with pytest.raises(PoleHitError) as err:
            t.apply([1.0, 0.0, 0.0])  # scaled to (2,0,0), the center
        assert err.value.primitive_index == 1

    def test_general_inversion_fixed_sphere(self):
        inv = SphereInversion(np.array([1.0, 1.0]), radius=2.0)
        x = np.array([1.0, 3.0])  # on the sphere of radius 2
        assert inv.apply(x) == pytest.approx(x)

    def test_orthogonal_validation(self):
        with pytest.raises(InputError):
            Orthogonal(np.array([[1.0, 0.1], [0.0, 1.0]]))

    def test_scaling_validation(self):
        with pytest.raises(InputError):
            Scaling(-2.0)


class TestChordIdentity:
    def test_hand_value(self):
        lhs, rhs = chord_identity_check([2, 0, 0], [0, 2, 0])
        assert lhs == pytest.approx(0.5, rel=1e-14)
        assert rhs == pytest.approx(0.5, rel=1e-14)

    def test_unit_sphere_points(self):
        x = np.array([1.0, 0.0, 0.0])
        y = np.array([0.0, 0.6, 0.8])
        lhs, rhs = chord_identity_check(x, y)
        assert rhs == pytest.approx(float(np.sum((x - y) ** 2)), rel=1e-14)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_random_pairs(self):
        rng = np.random.default_rng(4)
        for _ in range(500):
            x = rng.uniform(-5, 5, size=3)
            y = rng.uniform(-5, 5, size=3)
            if min(np.linalg.norm(x), np.linalg.norm(y)) < 1e-2:
                continue
            if np.linalg.norm(x - y) < 1e-6:
                continue
            lhs, rhs = chord_identity_check(x, y)
            assert abs(lhs - rhs) <= 1e-12 * rhs

    def test_pole_raises(self):
        with pytest.raises(PoleHitError):
            chord_identity_check([0, 0, 0], [1, 0, 0])


class TestCrossRatio:
    def test_unit_square_hand_value(self, unit_square):
        assert cross_ratio(unit_square, 0, 2) == pytest.approx(0.5, rel=1e-14)

    def test_symmetry(self):
        p = perturbed_ngon(9, 0.1, seed=7)
        for i, j in [(0, 2), (1, 5), (3, 7)]:
            assert cross_ratio(p, i, j) == pytest.approx(cross_ratio(p, j, i), rel=1e-14)

    def test_adjacent_raises(self, unit_square):
        with pytest.raises(AdjacencyError):
            cross_ratio(unit_square, 0, 1)
        with pytest.raises(AdjacencyError):
            cross_ratio(unit_square, 2, 2)

    def test_moebius_invariance(self):
        p = perturbed_ngon(10, 0.08, seed=9)
        rng = np.random.default_rng(13)
        for _ in range(20):
            t = random_transform(rng, p.vertices, margin=0.1 * p.diameter())
            q = t.apply_polygon(p)
            for i, j in [(0, 3), (2, 7), (4, 9)]:
                assert cross_ratio(q, i, j) == pytest.approx(
                    cross_ratio(p, i, j), rel=1e-10)


class TestApplyPolygonAndCurve:
    def test_identity(self):
        p = perturbed_ngon(8, 0.05, seed=2)
        q = MoebiusTransform().apply_polygon(p)
        assert q.vertices == pytest.approx(p.vertices)
        assert q.thetas == pytest.approx(p.thetas)

    def test_scaling_scales_edges(self):
        p = perturbed_ngon(8, 0.05, seed=3)
        q = MoebiusTransform([Scaling(3.5)]).apply_polygon(p)
        assert q.edge_lengths == pytest.approx(3.5 * p.edge_lengths, rel=1e-14)

    def test_inversion_preserves_cocircularity(self):
        p = regular_ngon(12, radius=1.0)
        t = MoebiusTransform([SphereInversion(np.array([3.0, 0.5, 0.25]), 1.3)])
        q = t.apply_polygon(p)
        v = q.vertices
        centers = []
        radii = []
        for (i, j, k) in [(0, 4, 8), (1, 5, 9), (2, 6, 10), (3, 7, 11)]:
            centers.append(circumcenter(v[i], v[j], v[k]))
            radii.append(circumradius(v[i], v[j], v[k]))
        centers = np.array(centers)
        radii = np.array(radii)
        assert np.max(np.abs(radii - radii[0])) <= 1e-8 * radii[0]
        assert np.max(np.linalg.norm(centers - centers[0], axis=1)) <= 1e-8 * radii[0]

    def test_apply_curve_chain_rule(self):
        from knotenergy import ellipse

        f = ellipse(2.0, 1.0)
        t = MoebiusTransform([SphereInversion(np.array([4.0, 1.0, 0.5]), 1.2),
                              Scaling(1.7)])
        g = t.apply_curve(f)
        xs = np.linspace(0.05, 0.95, 7)
        h = 1e-7
        fd = (g.position(xs + h) - g.position(xs - h)) / (2 * h)
        assert g.derivative(xs) == pytest.approx(fd, rel=1e-5)


class TestRandomTransform:
    def test_deterministic_per_seed(self):
        pts = regular_ngon(8).vertices
        t1 = random_transform(42, pts, margin=0.3)
        t2 = random_transform(42, pts, margin=0.3)
        assert json.dumps(t1.to_json_obj()) == json.dumps(t2.to_json_obj())

    def test_margin_respected(self):
        pts = regular_ngon(16).vertices
        for seed in range(20):
            t = random_transform(seed, pts, margin=0.5)
            inv = t.primitives[0]
            assert isinstance(inv, SphereInversion)
            dist = np.min(np.linalg.norm(pts - inv.center, axis=1))
            assert dist >= 0.5

    def test_avoided_points_never_error(self):
        pts = regular_ngon(16).vertices
        t = random_transform(3, pts, margin=0.2)
        t.apply_points(pts)  # must not raise

    def test_impossible_margin_raises(self):
        pts = regular_ngon(4).vertices
        with pytest.raises(GeometryError):
            random_transform(0, pts, margin=1e9, max_tries=20)

    def test_composition_structure(self):
        t = random_transform(1, regular_ngon(6).vertices, margin=0.2)
        kinds = [type(p) for p in t.primitives]
        assert kinds == [SphereInversion, Scaling, Orthogonal, Translation]


class TestTransformJSON:
    def test_round_trip(self, tmp_path):
        t = random_transform(7, regular_ngon(8).vertices, margin=0.2)
        path = tmp_path / "t.json"
        t.save_json(path)
        u = MoebiusTransform.load_json(path)
        x = np.array([1.0, 2.0, 3.0])
        assert u.apply(x) == pytest.approx(t.apply(x), rel=1e-15)

    def test_unknown_primitive(self):
        with pytest.raises(InputError):
            MoebiusTransform.from_json_obj([{"type": "shear", "amount": 1.0}])
