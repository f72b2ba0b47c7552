import math

import numpy as np
import pytest

from knotenergy import (
    ParametricCurve,
    SampledCurve,
    circle,
    ellipse,
    make_curve,
    modulus_D,
    mollify,
    torus_knot,
)
from knotenergy.curves import load_sampled, save_sampled_csv, save_sampled_json
from knotenergy.errors import GeometryError, InputError


class TestFamilies:
    def test_circle_values(self):
        f = circle(1.0)
        assert f.position(0.0) == pytest.approx([1, 0, 0])
        assert f.derivative(0.0) == pytest.approx([0, 2 * math.pi, 0])

    def test_ellipse_quarter(self):
        f = ellipse(2.0, 1.0)
        assert f.position(0.25) == pytest.approx([0, 1, 0], abs=1e-12)

    def test_torus_knot_closed_and_regular(self):
        f = torus_knot(2, 3, 2.0, 0.5)
        x = np.linspace(0, 1, 10_000, endpoint=False)
        gap = np.linalg.norm(f.position(x + 1.0) - f.position(x), axis=1)
        assert np.max(gap) <= 1e-12
        assert np.min(f.speed(x)) > 1.0

    def test_torus_knot_validation(self):
        with pytest.raises(InputError):
            torus_knot(2, 4)  # gcd != 1
        with pytest.raises(InputError):
            torus_knot(2, 3, R=1.0, r=1.5)

    def test_invalid_family_params(self):
        with pytest.raises(InputError):
            circle(-1.0)
        with pytest.raises(InputError):
            ellipse(2.0, 0.0)


class TestSpecStrings:
    def test_parses_each_family(self):
        assert make_curve("circle:R=2").params == {"R": 2.0}
        assert make_curve("ellipse:a=2,b=1").params == {"a": 2.0, "b": 1.0}
        f = make_curve("torus:p=2,q=3,R=2,r=0.5")
        assert f.params == {"p": 2, "q": 3, "R": 2.0, "r": 0.5}

    def test_defaults(self):
        assert make_curve("circle").params == {"R": 1.0}

    def test_round_trip(self):
        f = make_curve("ellipse:a=3,b=1.5")
        assert make_curve(f.spec_string()).params == f.params

    def test_unknown_family(self):
        with pytest.raises(InputError):
            make_curve("lemniscate:a=1")

    def test_bad_parameter(self):
        with pytest.raises(InputError):
            make_curve("circle:radius=1")
        with pytest.raises(InputError):
            make_curve("circle:R=one")


class TestDerivatives:
    @pytest.mark.parametrize("f", [circle(1.3), ellipse(2, 1), torus_knot(2, 3)],
                             ids=["circle", "ellipse", "trefoil"])
    def test_matches_finite_differences(self, f):
        rng = np.random.default_rng(1)
        x = rng.uniform(0, 1, size=1000)
        h = 1e-6
        fd = (f.position(x + h) - f.position(x - h)) / (2 * h)
        scale = np.linalg.norm(f.derivative(x), axis=-1, keepdims=True)
        assert np.max(np.linalg.norm(f.derivative(x) - fd, axis=-1) / scale.ravel()) <= 1e-6


class TestArcDistance:
    def test_half_circle(self):
        assert circle(1.0).arc_distance(0.0, 0.5) == pytest.approx(math.pi, abs=1e-8)

    def test_zero_for_equal_parameters(self):
        assert circle(1.0).arc_distance(0.3, 0.3) == 0.0

    def test_circle_formula(self):
        rng = np.random.default_rng(2)
        f = circle(1.7)
        for _ in range(200):
            x, y = rng.uniform(0, 1, 2)
            s = abs(x - y)
            expected = 2 * math.pi * 1.7 * min(s, 1 - s)
            assert f.arc_distance(x, y) == pytest.approx(expected, abs=1e-8)

    def test_at_least_chord(self):
        f = torus_knot(2, 3)
        rng = np.random.default_rng(3)
        x = rng.uniform(0, 1, 500)
        y = rng.uniform(0, 1, 500)
        chord = np.linalg.norm(f.position(x) - f.position(y), axis=-1)
        assert np.all(f.arc_distance(x, y) >= chord - 1e-9)


class TestMollify:
    def samples(self, n=64):
        return SampledCurve.from_curve(circle(1.0), n)

    def test_preserves_rotational_symmetry(self):
        n = 256
        g = mollify(self.samples(n), 0.1)
        # shifting by a grid step rotates the samples, so radii at equal
        # in-cell offsets agree to machine precision
        xs = np.arange(n) / n + 0.37 / n
        radii = np.linalg.norm(g.position(xs), axis=-1)
        assert np.max(radii) - np.min(radii) <= 1e-12
        assert radii[0] < 1.0  # slightly shrunk circle
        # between grid points the discrete convolution stays radially flat
        # to the kernel discretization error
        dense = np.linalg.norm(g.position(np.linspace(0, 1, 1001)), axis=-1)
        assert np.max(dense) - np.min(dense) <= 1e-6

    def test_approaches_samples_as_bandwidth_shrinks(self):
        s = self.samples(128)
        grid = np.arange(128) / 128
        dists = []
        for eps in (0.2, 0.1, 0.05):
            g = mollify(s, eps)
            dists.append(float(np.max(np.linalg.norm(g.position(grid) - s.samples, axis=-1))))
        assert dists[0] > dists[1] > dists[2]
        assert dists[2] < 0.05

    def test_partition_of_unity_shift(self):
        # weights summing to one <=> adding a constant to all samples adds
        # exactly that constant to the mollified curve
        s = self.samples()
        shift = np.array([0.7, -1.3, 2.1])
        g0 = mollify(s, 0.08)
        g1 = mollify(SampledCurve(s.samples + shift), 0.08)
        x = np.linspace(0, 1, 101)
        assert g1.position(x) == pytest.approx(g0.position(x) + shift, abs=1e-12)

    def test_periodicity(self):
        g = mollify(self.samples(), 0.1)
        x = np.linspace(0, 1, 37)
        gap = np.linalg.norm(g.position(x + 1) - g.position(x), axis=-1)
        assert np.max(gap) <= 1e-14  # argument-reduction rounding only

    def test_derivative_matches_finite_differences(self):
        g = mollify(SampledCurve.from_curve(ellipse(2, 1), 128), 0.07)
        rng = np.random.default_rng(5)
        x = rng.uniform(0, 1, 300)
        h = 1e-6
        fd = (g.position(x + h) - g.position(x - h)) / (2 * h)
        scale = np.linalg.norm(g.derivative(x), axis=-1)
        err = np.linalg.norm(g.derivative(x) - fd, axis=-1) / scale
        assert np.max(err) <= 1e-6

    def test_bandwidth_range_enforced(self):
        s = self.samples(16)
        with pytest.raises(InputError):
            mollify(s, 0.5)
        with pytest.raises(InputError):
            mollify(s, 1.0 / 32)


class TestSampledCurveValidation:
    def test_too_few_samples(self):
        with pytest.raises(GeometryError):
            SampledCurve(np.zeros((4, 3)) + np.arange(4)[:, None])

    def test_consecutive_duplicates(self):
        s = np.ones((10, 2)) * np.arange(10)[:, None]
        s[5] = s[4]
        with pytest.raises(GeometryError):
            SampledCurve(s)

    def test_csv_round_trip(self, tmp_path):
        s = SampledCurve.from_curve(circle(1.0), 16)
        path = tmp_path / "s.csv"
        save_sampled_csv(s, path)
        assert load_sampled(path).samples == pytest.approx(s.samples)

    def test_json_round_trip(self, tmp_path):
        s = SampledCurve.from_curve(ellipse(2, 1), 16)
        path = tmp_path / "s.json"
        save_sampled_json(s, path)
        assert load_sampled(path).samples == pytest.approx(s.samples)


class TestModulusD:
    def test_decreases_toward_zero_on_circle(self):
        f = circle(1.0)
        values = [modulus_D(f, r, grid=48) for r in (0.2, 0.1, 0.05)]
        assert values[0] > values[1] > values[2] > 0.0

    def test_nonuniform_speed_circle_is_finite(self):
        def warp(x):
            return x + 0.1 * np.sin(2 * np.pi * x) / (2 * np.pi)

        def dwarp(x):
            return 1.0 + 0.1 * np.cos(2 * np.pi * x)

        tau = 2 * np.pi

        def pos(x):
            s = warp(x)
            out = np.zeros(np.shape(x) + (3,))
            out[..., 0] = np.cos(tau * s)
            out[..., 1] = np.sin(tau * s)
            return out

        def der(x):
            s = warp(x)
            out = np.zeros(np.shape(x) + (3,))
            out[..., 0] = -tau * np.sin(tau * s) * dwarp(x)
            out[..., 1] = tau * np.cos(tau * s) * dwarp(x)
            return out

        f = ParametricCurve(pos, der, dim=3, name="warped-circle")
        v = modulus_D(f, 0.1, grid=48)
        assert math.isfinite(v) and v > 0.0

    def test_mollified_does_not_exceed_original(self):
        f = ellipse(2.0, 1.0)
        g = mollify(SampledCurve.from_curve(f, 256), 0.02)
        for r in (0.2, 0.1):
            orig = modulus_D(f, r, grid=48)
            smooth = modulus_D(g, r, grid=48)
            assert smooth <= orig * 1.05

    def test_argument_validation(self):
        with pytest.raises(InputError):
            modulus_D(circle(1.0), 0.6)
